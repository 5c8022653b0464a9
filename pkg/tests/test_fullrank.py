"""CFL policy and full micro-macro solver tests."""

import dataclasses

import numpy as np
import pytest

from slabrt import (
    BlowUpError,
    FullState,
    Grid,
    SigmaField,
    SolverConfig,
    build_operators,
    cfl_dt,
    density_gradient,
    energy,
    full_step,
    gauss_legendre,
    plane_source_initial,
    run_full,
)

BENCH_DX = 3.0 / 502


class TestCflPolicy:
    def test_benchmark_minimizer_transport_regime(self):
        # frozen minimizer values for N=100, dx=3/502, sigma0=1, eps=1
        quad = gauss_legendre(101)
        rep = cfl_dt(quad, 100, 1.0, BENCH_DX, 1.0)
        assert abs(rep.w_min - 0.01776) < 5e-4
        assert abs(abs(rep.mu_min) - 0.81890) < 5e-4
        assert rep.mu_min < 0  # ties break toward the negative node

    def test_benchmark_minimizer_diffusive_regime(self):
        quad = gauss_legendre(101)
        rep = cfl_dt(quad, 100, 1e-5, BENCH_DX, 1.0)
        assert abs(rep.w_min - 0.01278) < 5e-4
        assert abs(abs(rep.mu_min) - 0.91079) < 5e-4
        assert rep.mu_min < 0

    def test_report_consistency(self):
        quad = gauss_legendre(13)
        rep = cfl_dt(quad, 12, 0.5, 0.01, 2.0, safety=0.7)
        k = rep.minimizing_k
        assert rep.mu_min == quad.nodes[k]
        assert rep.w_min == quad.weights[k]
        assert rep.hyperbolic_part == pytest.approx(0.5 * 0.01 / abs(rep.mu_min))
        assert rep.parabolic_part == pytest.approx(2.0 * 0.01**2 / (2 * rep.mu_min**2))
        expected = 0.7 * (rep.hyperbolic_part + rep.parabolic_part) / (2 + 13 * rep.w_min)
        assert rep.dt == pytest.approx(expected, rel=1e-14)

    def test_hyperbolic_scaling_for_large_eps(self):
        quad = gauss_legendre(11)
        dts = [cfl_dt(quad, 10, eps, 0.01, 1.0).dt for eps in (100.0, 200.0)]
        assert dts[1] / dts[0] == pytest.approx(2.0, rel=1e-3)

    def test_parabolic_limit_at_zero_eps(self):
        quad = gauss_legendre(11)
        rep = cfl_dt(quad, 10, 0.0, 0.01, 1.0)
        assert rep.hyperbolic_part == 0.0
        assert rep.dt > 0

    def test_zero_node_excluded(self):
        # odd node count has an exact zero node; it must not poison the min
        quad = gauss_legendre(11)
        assert 0.0 in quad.nodes
        rep = cfl_dt(quad, 10, 1.0, 0.01, 1.0)
        assert np.isfinite(rep.dt) and rep.mu_min != 0.0

    def test_argument_validation(self):
        quad = gauss_legendre(5)
        with pytest.raises(ValueError):
            cfl_dt(quad, 4, -1.0, 0.01, 1.0)
        with pytest.raises(ValueError):
            cfl_dt(quad, 4, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            cfl_dt(quad, 4, 1.0, 0.01, -2.0)
        with pytest.raises(ValueError):
            cfl_dt(quad, 4, 1.0, 0.01, 1.0, safety=0.0)


def small_setup(n=8, nx=64, boundary="periodic", sigma=1.0):
    grid = Grid(-1.5, 1.5, nx, boundary)
    ops = build_operators(n)
    sig = SigmaField.from_spec(sigma, grid)
    return grid, ops, sig


class TestFullStep:
    def test_constant_state_is_stationary(self):
        grid, ops, sig = small_setup()
        st = FullState(rho=np.full(grid.nx, 2.0), g=np.zeros((grid.n_interfaces, 8)))
        out = full_step(st, ops, grid, sig, 1.0, 1e-2)
        assert np.array_equal(out.rho, st.rho)
        assert np.array_equal(out.g, st.g)

    def test_pure_source_response(self):
        # from g = 0 one step yields the damped density-gradient source
        grid, ops, sig = small_setup()
        rng = np.random.default_rng(5)
        rho = rng.standard_normal(grid.nx)
        st = FullState(rho=rho, g=np.zeros((grid.n_interfaces, 8)))
        eps, dt = 0.5, 1e-3
        out = full_step(st, ops, grid, sig, eps, dt)
        grad = density_gradient(rho, grid)
        expected = -(dt / eps**2) / (1 + dt * sig.values[:, None] / eps**2) \
            * np.outer(grad, ops.a)
        assert np.max(np.abs(out.g - expected)) < 1e-14
        assert out.time == pytest.approx(dt)

    @pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-5])
    @pytest.mark.parametrize("n", [3, 10, 100])
    def test_energy_monotone_small_runs(self, eps, n):
        grid, ops, sig = small_setup(n=n, nx=64, boundary="vacuum")
        st = plane_source_initial(grid, 0.1, n)
        rep = cfl_dt(ops.quad, n, eps, grid.dx, sig.sigma0)
        e_prev = energy(st, eps, grid)
        for _ in range(60):
            st = full_step(st, ops, grid, sig, eps, rep.dt)
            e = energy(st, eps, grid)
            assert e <= e_prev * (1 + 1e-13)
            e_prev = e

    def test_micro_damping_with_decoupled_source(self):
        # with the coupling vector zeroed, the implicit relaxation contracts g
        grid, ops, sig = small_setup(n=5)
        ops0 = dataclasses.replace(ops, a=np.zeros(5))
        rng = np.random.default_rng(6)
        st = FullState(
            rho=rng.standard_normal(grid.nx),
            g=rng.standard_normal((grid.n_interfaces, 5)),
        )
        eps = 1e-5
        dt = cfl_dt(ops.quad, 5, eps, grid.dx, 1.0).dt
        for _ in range(20):
            new = full_step(st, ops0, grid, sig, eps, dt)
            assert np.linalg.norm(new.g) <= np.linalg.norm(st.g)
            st = new

    def test_validation(self):
        grid, ops, sig = small_setup()
        st = FullState(rho=np.zeros(grid.nx), g=np.zeros((grid.n_interfaces, 8)))
        with pytest.raises(ValueError):
            full_step(st, ops, grid, sig, 1.0, 0.0)
        with pytest.raises(ValueError):
            full_step(st, ops, grid, sig, -1.0, 1e-3)
        bad = FullState(rho=np.zeros(grid.nx - 1), g=np.zeros((grid.n_interfaces, 8)))
        with pytest.raises(ValueError):
            full_step(bad, ops, grid, sig, 1.0, 1e-3)


def bench_config(**kw):
    base = dict(
        eps=1.0, nx=64, moments=8, solver="full", t_end=0.05,
        boundary="vacuum", initial_std=0.1, out_dir="unused",
    )
    base.update(kw)
    return SolverConfig(**base).validate()


class TestRunFull:
    def test_zero_horizon_returns_initial(self):
        cfg = bench_config(t_end=0.0)
        traj = run_full(cfg)
        assert traj.steps == 0
        assert len(traj.energies) == 1
        grid = cfg.make_grid()
        st0 = cfg.initial_state(grid)
        assert np.array_equal(traj.final_rho, st0.rho)

    def test_lands_exactly_on_t_end(self):
        cfg = bench_config(t_end=0.0371)
        traj = run_full(cfg)
        assert traj.final_time == cfg.t_end
        assert traj.times[-1] == cfg.t_end

    def test_deterministic(self):
        cfg = bench_config()
        t1, t2 = run_full(cfg), run_full(cfg)
        assert np.array_equal(t1.final_rho, t2.final_rho)
        assert np.array_equal(t1.energies, t2.energies)
        assert np.array_equal(t1.final_state.g, t2.final_state.g)

    def test_symmetric_data_stays_symmetric(self):
        traj = run_full(bench_config(t_end=0.1))
        rho = traj.final_rho
        assert np.max(np.abs(rho - rho[::-1])) < 1e-10

    def test_energy_recorded_every_step(self):
        traj = run_full(bench_config())
        assert len(traj.energies) == traj.steps + 1
        assert np.all(np.diff(traj.energies) <= 1e-13 * traj.energies[:-1])

    def test_snapshot_capture(self):
        cfg = bench_config(t_end=0.05, profile_times=[0.0, 0.02, 99.0])
        traj = run_full(cfg)
        assert [s.requested_time for s in traj.snapshots] == [0.0, 0.02, 99.0]
        assert traj.snapshots[0].step == 0
        mid = traj.snapshots[1]
        assert mid.time >= 0.02 and mid.time - 0.02 < traj.dt * 1.001
        assert traj.snapshots[2].time == traj.final_time

    def test_blowup_reports_step(self):
        cfg = bench_config(moments=4, nx=32, cfl_safety=8.0, t_end=200.0)
        with pytest.raises(BlowUpError) as exc_info:
            run_full(cfg)
        assert exc_info.value.step is not None and exc_info.value.step > 1

    def test_sharpness_probe_diagnostic(self, capsys):
        # Diagnostic, not an assertion: document where the bound stops being
        # sufficient.  At these parameters safety=8 sits just inside the
        # stable region (0.98x the explicit diffusion limit) while 12 leaves it.
        for safety in (8.0, 12.0):
            cfg = bench_config(eps=1e-5, moments=20, nx=64, cfl_safety=safety,
                               t_end=0.003)
            first_up = None
            try:
                traj = run_full(cfg)
                e = traj.energies
                up = np.nonzero(e[1:] > e[:-1] * (1 + 1e-13))[0]
                first_up = int(up[0]) + 1 if up.size else None
            except BlowUpError as err:
                first_up = err.step
            print(f"cfl probe safety={safety}: first energy increase at step {first_up}")
