import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trwnoc.channel import (
    SPEED_OF_LIGHT,
    CavityModel,
    ChannelImpulseResponse,
    MultipathTap,
    Position,
    discretize,
    export_cir_trace,
    image_count,
    import_cir_trace,
    monopole_length,
    propagation_velocity,
    rms_delay_spread,
    synth_cavity_cir,
)
from trwnoc.exceptions import (
    DegenerateGeometryError,
    DomainError,
    EmptyTraceError,
    MalformedRowError,
    NonUniformGridError,
    ZeroEnergyError,
)

DEFAULT_TX = Position(1.4e-3, 5.0e-3)
DEFAULT_RX = Position(8.6e-3, 5.0e-3)


class TestVelocityAndMonopole:
    def test_vacuum(self):
        assert propagation_velocity(1) == SPEED_OF_LIGHT

    def test_silicon(self):
        # 299792458 / sqrt(11.9) = 299792458 / 3.44963766... = 8.6905e7
        assert propagation_velocity(11.9) == pytest.approx(8.6905e7, rel=1e-4)

    def test_perfect_square(self):
        assert propagation_velocity(4) == SPEED_OF_LIGHT / 2

    def test_permittivity_below_one(self):
        with pytest.raises(DomainError):
            propagation_velocity(0.5)

    def test_monopole_silicon_60ghz(self):
        assert monopole_length(60e9, 11.9) == pytest.approx(3.62e-4, rel=2e-3)

    def test_monopole_vacuum(self):
        assert monopole_length(60e9, 1) == pytest.approx(SPEED_OF_LIGHT / 2.4e11)
        assert monopole_length(60e9, 1) == pytest.approx(1.249e-3, rel=1e-3)

    def test_monopole_scales_with_permittivity(self):
        assert monopole_length(60e9, 4) == pytest.approx(monopole_length(60e9, 1) / 2)

    @pytest.mark.parametrize("f", [0.0, -1e9])
    def test_monopole_bad_frequency(self, f):
        with pytest.raises(DomainError):
            monopole_length(f, 11.9)


class TestSynthCavity:
    def test_direct_path_only(self):
        cav = CavityModel(max_image_order=0)
        cir = synth_cavity_cir(cav, DEFAULT_TX, DEFAULT_RX)
        assert len(cir.taps) == 1
        assert DEFAULT_TX.distance_to(DEFAULT_RX) == pytest.approx(7.2e-3)
        assert cir.taps[0].delay == pytest.approx(8.28e-11, rel=1e-3)

    def test_zero_reflection_keeps_only_direct_energy(self):
        cir = synth_cavity_cir(CavityModel(wall_reflection_coefficient=0.0), DEFAULT_TX, DEFAULT_RX)
        nonzero = [t for t in cir.taps if t.amplitude > 0]
        assert len(nonzero) == 1
        assert nonzero[0].delay == cir.taps[0].delay

    def test_first_order_has_five_taps(self):
        cir = synth_cavity_cir(CavityModel(max_image_order=1), DEFAULT_TX, DEFAULT_RX)
        assert len(cir.taps) == 5

    def test_first_delay_is_direct_distance(self):
        cav = CavityModel()
        cir = synth_cavity_cir(cav, DEFAULT_TX, DEFAULT_RX)
        assert cir.taps[0].delay == DEFAULT_TX.distance_to(DEFAULT_RX) / cav.velocity

    def test_tap_law(self):
        cav = CavityModel(max_image_order=1, wall_reflection_coefficient=0.7,
                          path_loss_exponent=1.0)
        cir = synth_cavity_cir(cav, DEFAULT_TX, DEFAULT_RX, carrier_frequency=60e9)
        for t in cir.taps:
            d = t.delay * cav.velocity
            n = 0 if math.isclose(d, 7.2e-3, rel_tol=1e-12) else 1
            assert t.amplitude == pytest.approx(0.7 ** n / d, rel=1e-12)
            assert t.phase == pytest.approx((-2 * math.pi * 60e9 * t.delay) % (2 * math.pi),
                                            abs=1e-9)

    def test_sorted_and_deterministic(self):
        a = synth_cavity_cir(CavityModel(), DEFAULT_TX, DEFAULT_RX)
        b = synth_cavity_cir(CavityModel(), DEFAULT_TX, DEFAULT_RX)
        delays = [t.delay for t in a.taps]
        assert delays == sorted(delays)
        assert a.taps == b.taps
        assert np.array_equal(a.samples, b.samples)

    def test_coincident_positions_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            synth_cavity_cir(CavityModel(), DEFAULT_TX, Position(DEFAULT_TX.x, DEFAULT_TX.y))

    def test_outside_cavity_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            synth_cavity_cir(CavityModel(), DEFAULT_TX, Position(11e-3, 5e-3))

    def test_attenuation_reduces_later_taps_more(self):
        lossless = synth_cavity_cir(CavityModel(max_image_order=2), DEFAULT_TX, DEFAULT_RX)
        lossy = synth_cavity_cir(CavityModel(max_image_order=2, attenuation=50.0),
                                 DEFAULT_TX, DEFAULT_RX)
        ratios = [b.amplitude / a.amplitude for a, b in zip(lossless.taps, lossy.taps)]
        assert all(r < 1 for r in ratios)
        assert ratios[0] > ratios[-1]

    @pytest.mark.parametrize("order", range(0, 9))
    def test_tap_count_matches_lattice_count(self, order):
        cir = synth_cavity_cir(CavityModel(max_image_order=order), DEFAULT_TX, DEFAULT_RX)
        assert len(cir.taps) == image_count(order) == 1 + 2 * order * (order + 1)

    @pytest.mark.parametrize("order", [0, 1, 2, 3])
    def test_images_match_brute_force_reflections(self, order):
        # reflect the source across the four walls repeatedly and keep the
        # fewest reflections that reach each distinct image point
        W = H = 10e-3
        src, rx = (DEFAULT_TX.x, DEFAULT_TX.y), DEFAULT_RX
        best = {(round(src[0], 15), round(src[1], 15)): 0}
        frontier = {src}
        for n in range(1, order + 1):
            nxt = set()
            for x, y in frontier:
                for p in ((-x, y), (2 * W - x, y), (x, -y), (x, 2 * H - y)):
                    key = (round(p[0], 15), round(p[1], 15))
                    if key not in best:
                        best[key] = n
                        nxt.add(p)
            frontier = nxt
        expected = Counter(
            (round(math.hypot(x - rx.x, y - rx.y), 12), n) for (x, y), n in best.items())
        cav = CavityModel(max_image_order=order, path_loss_exponent=1.0,
                          wall_reflection_coefficient=0.5)
        got = Counter()
        for t in synth_cavity_cir(cav, DEFAULT_TX, rx).taps:
            d = t.delay * cav.velocity
            n = round(math.log(t.amplitude * d) / math.log(0.5))
            got[(round(d, 12), n)] += 1
        assert got == expected

    @given(st.floats(0.3e-3, 9.7e-3), st.floats(0.3e-3, 9.7e-3),
           st.floats(0.3e-3, 9.7e-3), st.floats(0.3e-3, 9.7e-3),
           st.integers(0, 5))
    def test_reciprocity(self, ax, ay, bx, by, order):
        a, b = Position(ax, ay), Position(bx, by)
        if a.distance_to(b) < 1e-6:
            return
        cav = CavityModel(max_image_order=order)
        fwd = synth_cavity_cir(cav, a, b)
        rev = synth_cavity_cir(cav, b, a)
        assert sorted((t.amplitude, t.phase, t.delay) for t in fwd.taps) == \
            sorted((t.amplitude, t.phase, t.delay) for t in rev.taps)


class TestDiscretize:
    def test_identity(self):
        assert np.array_equal(discretize([MultipathTap(1, 0, 0)], 1e9), [1])

    def test_adjacent(self):
        out = discretize([MultipathTap(1, 0, 0), MultipathTap(1, 0, 1e-9)], 1e9)
        assert np.allclose(out, [1, 1])

    def test_coherent_cancellation(self):
        out = discretize([MultipathTap(1, 0, 0), MultipathTap(1, math.pi, 0)], 1e9)
        assert out.shape == (1,)
        assert abs(out[0]) < 1e-15

    def test_length(self):
        out = discretize([MultipathTap(1, 0, 0), MultipathTap(1, 0, 4.6e-9)], 1e9)
        assert out.size == round(4.6) + 1

    def test_empty(self):
        with pytest.raises(DomainError):
            discretize([], 1e9)

    @given(st.lists(st.tuples(st.floats(0, 2), st.floats(0, 6.28), st.floats(0, 2e-9)),
                    min_size=1, max_size=8),
           st.lists(st.tuples(st.floats(0, 2), st.floats(0, 6.28), st.floats(0, 2e-9)),
                    min_size=1, max_size=8))
    def test_linearity(self, a, b):
        ta = [MultipathTap(*t) for t in a]
        tb = [MultipathTap(*t) for t in b]
        fs = 10e9
        da, db = discretize(ta, fs), discretize(tb, fs)
        both = discretize(sorted(ta + tb, key=lambda t: t.delay), fs)
        n = both.size
        pad = lambda v: np.pad(v, (0, n - v.size))  # noqa: E731
        assert np.allclose(both, pad(da) + pad(db), atol=1e-12)


class TestRmsDelaySpread:
    def _cir(self, taps):
        taps = sorted(taps, key=lambda t: t.delay)
        return ChannelImpulseResponse(discretize(taps, 1e12), 1e12, taps=taps)

    def test_single_tap(self):
        assert rms_delay_spread(self._cir([MultipathTap(1, 0, 2e-9)])) == 0

    def test_two_equal_taps(self):
        cir = self._cir([MultipathTap(1, 0, 0), MultipathTap(1, 0, 1e-9)])
        assert rms_delay_spread(cir) == pytest.approx(0.5e-9, rel=1e-12)

    def test_shifted(self):
        cir = self._cir([MultipathTap(1, 0, 3e-9), MultipathTap(1, 0, 4e-9)])
        assert rms_delay_spread(cir) == pytest.approx(0.5e-9, rel=1e-9)

    def test_zero_energy(self):
        cir = ChannelImpulseResponse([0j, 0j], 1e9)
        with pytest.raises(ZeroEnergyError):
            rms_delay_spread(cir)

    def test_trace_only_uses_samples(self):
        cir = ChannelImpulseResponse([1, 0, 1], 1e9)
        assert rms_delay_spread(cir) == pytest.approx(1e-9)

    @given(st.lists(st.tuples(st.floats(0.01, 3), st.floats(0, 5e-9)), min_size=1, max_size=10),
           st.floats(0, 1e-8), st.floats(0.01, 100))
    def test_shift_and_scale_invariance(self, taps, shift, scale):
        base = self._cir([MultipathTap(a, 0, d) for a, d in taps])
        moved = self._cir([MultipathTap(a * scale, 0, d + shift) for a, d in taps])
        assert rms_delay_spread(moved) == pytest.approx(rms_delay_spread(base), rel=1e-6, abs=1e-20)


class TestTraceIO:
    def _write(self, tmp_path, text):
        p = tmp_path / "trace.csv"
        p.write_text(text)
        return p

    def test_three_rows(self, tmp_path):
        p = self._write(tmp_path, "time_s,real,imag\n0,1,0\n1e-12,0.5,0\n2e-12,0.25,0\n")
        cir = import_cir_trace(p)
        assert np.array_equal(cir.samples, [1, 0.5, 0.25])
        assert cir.sample_rate == pytest.approx(1e12, rel=1e-12)
        assert cir.taps == ()

    def test_headerless(self, tmp_path):
        p = self._write(tmp_path, "0,1,0\n1e-12,0.5,0\n2e-12,0.25,0\n")
        assert len(import_cir_trace(p)) == 3

    def test_nonuniform(self, tmp_path):
        p = self._write(tmp_path, "time_s,real,imag\n0,1,0\n1e-12,0.5,0\n2.5e-12,0.25,0\n")
        with pytest.raises(NonUniformGridError, match="line 3"):
            import_cir_trace(p)

    def test_within_one_ppm_accepted(self, tmp_path):
        p = self._write(tmp_path, "0,1,0\n1.0000002e-12,0.5,0\n2e-12,0.25,0\n")
        assert len(import_cir_trace(p)) == 3

    def test_empty(self, tmp_path):
        with pytest.raises(EmptyTraceError):
            import_cir_trace(self._write(tmp_path, "time_s,real,imag\n"))
        with pytest.raises(EmptyTraceError):
            import_cir_trace(self._write(tmp_path, ""))

    @pytest.mark.parametrize("row", ["1e-12,abc,0", "1e-12,0.5", "1e-12,0.5,0,9", "1e-12,nan,0"])
    def test_malformed(self, tmp_path, row):
        p = self._write(tmp_path, f"time_s,real,imag\n0,1,0\n{row}\n")
        with pytest.raises(MalformedRowError, match="line 3"):
            import_cir_trace(p)

    def test_bad_header(self, tmp_path):
        with pytest.raises(MalformedRowError, match="line 1"):
            import_cir_trace(self._write(tmp_path, "t,re,im\n0,1,0\n1,1,0\n"))

    def test_unknown_format(self, tmp_path):
        with pytest.raises(DomainError):
            import_cir_trace(self._write(tmp_path, "0,1,0\n"), format="hdf5")

    def test_round_trip_bit_exact(self, tmp_path):
        cir = synth_cavity_cir(CavityModel(), DEFAULT_TX, DEFAULT_RX)
        p = tmp_path / "cir.csv"
        export_cir_trace(cir, p)
        back = import_cir_trace(p)
        assert np.array_equal(back.samples, cir.samples)
        assert back.sample_rate == pytest.approx(cir.sample_rate, rel=1e-9)
        assert p.read_text().splitlines()[0] == "time_s,real,imag"


class TestTypes:
    def test_tap_validation(self):
        with pytest.raises(DomainError):
            MultipathTap(-1, 0, 0)
        with pytest.raises(DomainError):
            MultipathTap(1, 0, -1e-9)
        with pytest.raises(DomainError):
            MultipathTap(1, 2 * math.pi, 0)

    def test_cavity_validation(self):
        with pytest.raises(DomainError):
            CavityModel(wall_reflection_coefficient=1.1)
        with pytest.raises(DomainError):
            CavityModel(relative_permittivity=0.9)

    def test_unsorted_taps_rejected(self):
        with pytest.raises(DomainError):
            ChannelImpulseResponse([1], 1e9, taps=(MultipathTap(1, 0, 2e-9), MultipathTap(1, 0, 0)))

    def test_samples_read_only(self):
        cir = ChannelImpulseResponse([1, 2], 1e9)
        with pytest.raises(ValueError):
            cir.samples[0] = 5

    def test_energy_positive_for_synth(self):
        assert synth_cavity_cir(CavityModel(), DEFAULT_TX, DEFAULT_RX).energy > 0
