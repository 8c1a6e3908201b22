"""Reduction-rate monotonicity: sweep the (x, tau) grid and rank-correlate.

Reproduces the shape of the sweep experiment at desk scale: for every
samples-per-class value the reduction rate is monotone non-increasing in the
linkage threshold (strongly negative rho) or constant (undefined rho), which
is exactly what the binary search relies on.
"""

import mutspect as ms

dataset = ms.gaussian_blobs(500, 5, 12, seed=7, spread=0.3)
model = ms.fitted_classifier(dataset, hidden=(16, 16), seed=12, margin=6.0, bias_shift=3.0)
mutants = ms.diverse_mutant_set(model, 100, seed=23)

spec = ms.SweepSpec()  # 11 x-values, 19 thresholds, 5 repeats = 1045 cells
print(f"sweeping {len(spec.x_grid)} x {len(spec.tau_grid)} x {spec.repeats} "
      f"= {len(spec.x_grid) * len(spec.tau_grid) * spec.repeats} cells")
sweep = ms.run_sweep(model, mutants, dataset, spec, ms.Seeds(1, 2))

print(f"\nvanilla score: {sweep.vanilla_score:.4f}")
print(f"{'x':>4} {'rho per repeat':<48} {'pooled':>8}")
for x in spec.x_grid:
    per_rep = []
    for repeat in range(spec.repeats):
        rho = sweep.rho_per_repeat[(x, repeat)]
        per_rep.append("  N/A " if rho is None else f"{rho:6.3f}")
    pooled = sweep.rho_pooled[x]
    pooled_s = "N/A" if pooled is None else f"{pooled:.3f}"
    print(f"{x:>4} {' '.join(per_rep):<48} {pooled_s:>8}")

# one slice of the raw curve, the way the plot-ready CSV exports it
x0 = spec.x_grid[0]
curve = [(c.tau, c.reduction_rate) for c in sweep.cells
         if c.per_class_rate == x0 and c.repeat == 0]
print(f"\nreduction-rate curve at x={x0}, repeat 0:")
print("  tau :", " ".join(f"{t:.2f}" for t, _ in curve))
print("  rate:", " ".join(f"{r:.2f}" for _, r in curve))
