# How many sinusoids are in this record?
#
# Three closely spaced tones (0.2, 0.201, 0.202 cycles/sample for n = 1000)
# in white Gaussian noise.  Each candidate order k keeps the first k tones
# and scores n ln(residual variance) + (2k + 1) nu.  The script prints the
# full score table for one record, then shows how often each rule finds the
# right count as the noise grows.

import numpy as np

from gicdesign import (
    PenaltyRule,
    build_sinusoid_scenario,
    design_nu_glm,
    estimate_order_glm,
    synth_sinusoids,
)

n = 1000
q = 3
amps = (1.0, 1.0, 1.0)
phases = (0.0, np.pi / 4, np.pi / 3)
scenario = build_sinusoid_scenario(q_max=6, n=n)

# noise_var = 10 puts the record at -10 dB SNR for these amplitudes
y = synth_sinusoids(amps, phases, n, noise_var=10.0, seed=5)

print("score table at -10 dB (one record):")
print(f"  {'k':>2} {'-2 ln f':>12} {'AIC total':>12} {'BIC total':>12}")
aic = estimate_order_glm(y, scenario, PenaltyRule.aic())
bic = estimate_order_glm(y, scenario, PenaltyRule.bic())
for k in aic.orders:
    print(f"  {k:2d} {aic.minus2loglik[k]:12.2f} {aic.total[k]:12.2f} {bic.total[k]:12.2f}")
print(f"AIC picks {aic.selected}, BIC picks {bic.selected}, truth is {q}")

# the designed weight caps the false-alarm mass using the exact beta law
# of the residual ratios, no simulation involved
design = design_nu_glm(n, pover_max=0.05)
print(f"\ndesigned nu for P_over <= 0.05 at n = {n}: {design.nu:.4f}")

rules = {
    "aic": PenaltyRule.aic(),
    f"gic:{design.nu:.3f}": PenaltyRule.gic(design.nu),
    "bic": PenaltyRule.bic(),
}

trials = 400
print(f"\ncorrect-order rate over {trials} records:")
print(f"  {'SNR dB':>7} " + " ".join(f"{name:>10}" for name in rules))
for snr_db in (-18, -15, -12, -9, -6):
    # SNR fixes the noise variance given the summed squared amplitudes
    noise_var = float(np.sum(np.square(amps)) / 10.0 ** (snr_db / 10.0))
    hits = {name: 0 for name in rules}
    rng = np.random.default_rng(100 + snr_db)
    for _ in range(trials):
        rec = synth_sinusoids(amps, phases, n, noise_var, rng=rng)
        for name, rule in rules.items():
            if estimate_order_glm(rec, scenario, rule).selected == q:
                hits[name] += 1
    row = " ".join(f"{hits[name] / trials:10.3f}" for name in rules)
    print(f"  {snr_db:7d} {row}")

print("\nAIC is the first to find all three tones as SNR rises but keeps a")
print("constant overestimation tax; BIC holds out longest at low SNR; the")
print("designed weight sits between, with a guaranteed false-alarm cap.")
