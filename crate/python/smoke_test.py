"""Quick check that the `qbm` extension loads and its main entry points work.

Build first, e.g. `maturin develop -m crates/python/Cargo.toml`, or copy
`target/release/libqbm.so` to `qbm.so` somewhere on PYTHONPATH.
"""

import math

import qbm

theta = (math.sqrt(5) - 1) / 2

u = qbm.TorusElement.monomial(theta, 1, 0)
v = qbm.TorusElement.monomial(theta, 0, 1)
vu = v * u
uv = u * v
assert abs(vu.coeff(1, 1) - complex(math.cos(2 * math.pi * theta), -math.sin(2 * math.pi * theta))) < 1e-14
assert abs((u * u.star()).trace() - 1) < 1e-14
assert uv.max_coeff_diff(qbm.TorusElement.from_json(uv.to_json())) == 0.0

heat = u.heat(0.1)
assert abs(heat.coeff(1, 0) - math.exp(-0.2 * math.pi**2)) < 1e-14

p = qbm.rieffel_projection(theta, grid=1024)
report = p.is_projection()
assert report["idempotent_residual"] < 1e-10, report
assert abs(p.trace().real - theta) < 1e-12

q = p.translate(0.03, 0.0)
meet, summary = qbm.meet_iterative([p, q])
closed = qbm.meet_closed_form(theta, 0.0, 0.0, 0.03, 0.0, grid=1024)
assert meet.sup_diff(closed) < 1e-6, meet.sup_diff(closed)

mc = qbm.vacuum_expectation_mc(u + v, 0.05, n_paths=20000, seed=1)
assert isinstance(mc, dict)

assert qbm.convergents(theta, 6) == [1, 2, 3, 5, 8, 13]
inv = qbm.extract_invariants(1, 1 / 32, 1 / 768)
assert abs(inv["d"] - 5.0) < 1e-9 and abs(inv["h_squared"] - 1.0) < 1e-9, inv

summary, csv = qbm.exit_asymptotics(theta, count=6, n_paths=500, seed=2)
assert summary["n0"] == 1 and csv.count("\n") >= 6

g = qbm.check_torus_generator(-1, -1, -2)
assert g["gaussian_valid"], g
assert qbm.solve_biinvariant_oplus(2)["dimension"] == 0
computed, formula = qbm.epsilon_derivation_dim("oplus", 2)
assert computed == formula

e = qbm.convolution_exp([[-1, 0], [0, -2]], 1.0)
assert abs(e[1][1] - math.exp(-2)) < 1e-12

try:
    qbm.rieffel_projection(theta, epsilon=0.9)
except ValueError:
    pass
else:
    raise AssertionError("bad epsilon accepted")

print("qbm", qbm.__version__, "smoke test ok")
