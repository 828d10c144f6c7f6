import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import gaussian_tail
from trwnoc.channel import (
    CavityModel,
    ChannelImpulseResponse,
    Position,
    rms_delay_spread,
    synth_cavity_cir,
)
from trwnoc.exceptions import DomainError, SampleRateMismatchError, ZeroEnergyError
from trwnoc.link import (
    LinkConfig,
    NoiseReference,
    add_awgn,
    derive_seed,
    noise_sigma,
    run_interference_probe,
    run_trial,
    run_trials,
)
from trwnoc.modem import ModulationScheme, SchemeKind, Waveform

FS = 480e9
IDENTITY = ChannelImpulseResponse([1.0], FS)


def config(kind=SchemeKind.CW_ASK, rate=10e9, snr=16.0, n_bits=1000, tr=False, seed=1,
           channel=IDENTITY, **kw):
    return LinkConfig(ModulationScheme(kind), rate, snr, n_bits, tr, seed, channel, **kw)


@pytest.fixture(scope="module")
def cavity_cir():
    return synth_cavity_cir(CavityModel(), Position(1.4e-3, 5e-3), Position(8.6e-3, 5e-3))


class TestAwgn:
    def test_infinite_snr_passthrough(self):
        w = Waveform([1, 2j], FS)
        out, spec = add_awgn(w, math.inf, seed=0)
        assert out is w
        assert spec.sigma == 0

    def test_deterministic(self):
        w = Waveform(np.ones(100), FS)
        a, _ = add_awgn(w, 3.0, seed=7)
        b, _ = add_awgn(w, 3.0, seed=7)
        assert np.array_equal(a.samples, b.samples)

    def test_variance(self):
        w = Waveform(np.ones(10 ** 6), FS)
        out, spec = add_awgn(w, 16.0, seed=3)
        assert spec.sigma ** 2 == pytest.approx(10 ** -1.6)
        noise = out.samples - w.samples
        assert np.var(noise) == pytest.approx(spec.sigma ** 2, rel=0.01)
        # circular: half the power in each quadrature
        assert np.var(noise.real) == pytest.approx(spec.sigma ** 2 / 2, rel=0.01)

    def test_explicit_signal_power(self):
        _, spec = add_awgn(Waveform(np.ones(4), FS), 0.0, seed=0, signal_power=4.0)
        assert spec.sigma == pytest.approx(2.0)

    def test_errors(self):
        with pytest.raises(DomainError):
            add_awgn(Waveform([1], FS), math.nan, seed=0)
        with pytest.raises(ZeroEnergyError):
            add_awgn(Waveform([0, 0], FS), 10.0, seed=0)

    def test_noise_sigma(self):
        assert noise_sigma(1.0, 20.0) == pytest.approx(0.1)
        assert noise_sigma(1.0, math.inf) == 0.0


class TestSeeds:
    def test_derive_seed_stable_and_distinct(self):
        assert derive_seed(20240101, 1, 2) == derive_seed(20240101, 1, 2)
        seeds = {derive_seed(20240101, i, j) for i in range(10) for j in range(10)}
        assert len(seeds) == 100


class TestRunTrial:
    @pytest.mark.parametrize("kind", list(SchemeKind))
    @pytest.mark.parametrize("tr", [False, True])
    def test_noiseless_identity_is_error_free(self, kind, tr):
        r = run_trial(config(kind, snr=math.inf, tr=tr))
        assert r.n_errors == 0 and r.ber == 0.0 and r.noise_sigma == 0.0

    @pytest.mark.parametrize("kind", list(SchemeKind))
    def test_tr_equals_plain_on_identity(self, kind):
        a = run_trial(config(kind, snr=2.0, tr=False, seed=5))
        b = run_trial(config(kind, snr=2.0, tr=True, seed=5))
        assert a == b

    @pytest.mark.parametrize("kind", list(SchemeKind))
    def test_tr_equals_plain_on_single_delayed_tap(self, kind):
        ch = ChannelImpulseResponse([0, 0, 0.3 * np.exp(1j)], FS)
        a = run_trial(config(kind, snr=4.0, tr=False, seed=9, channel=ch))
        b = run_trial(config(kind, snr=4.0, tr=True, seed=9, channel=ch))
        assert (a.n_errors, a.noise_sigma) == (b.n_errors, pytest.approx(b.noise_sigma))

    def test_deterministic(self, cavity_cir):
        c = config(rate=20e9, snr=6.0, tr=True, seed=11, channel=cavity_cir, n_bits=500)
        assert run_trial(c) == run_trial(c)

    def test_bpsk_matches_awgn_oracle(self):
        # per-sample SNR; the correlator integrates sps samples, so Es/N0 = sps * SNR
        n, sps = 100_000, 4
        for snr in (0.0, 4.0):
            r = run_trial(config(SchemeKind.BPSK, rate=FS / sps, snr=snr, n_bits=n, seed=2))
            p = gaussian_tail(math.sqrt(2 * sps * 10 ** (snr / 10)))
            assert abs(r.ber - p) <= 3 * math.sqrt(p * (1 - p) / n)

    def test_ber_decreases_with_snr(self):
        mean_ber = []
        for snr in (-4.0, -2.0, 0.0, 2.0):
            mean_ber.append(np.mean([run_trial(config(snr=snr, n_bits=2000,
                                                      seed=derive_seed(4, s))).ber
                                     for s in range(10)]))
        assert all(a > b for a, b in zip(mean_ber, mean_ber[1:]))

    def test_tr_beats_plain_above_delay_spread_limit(self, cavity_cir):
        # every sweep rate above 1/(5 tau_rms); where both arms are error-free
        # the ordering is a tie
        limit = 1 / (5 * rms_delay_spread(cavity_cir))
        rates = [r for r in (1e9, 2e9, 3e9, 5e9, 10e9, 20e9, 30e9, 60e9) if r > limit]
        assert len(rates) >= 5
        strict = 0
        for i, rate in enumerate(rates):
            seed = derive_seed(3, i)
            plain = run_trial(config(rate=rate, n_bits=10_000, seed=seed, channel=cavity_cir))
            tr = run_trial(config(rate=rate, n_bits=10_000, seed=seed, channel=cavity_cir, tr=True))
            if plain.n_errors:
                assert tr.ber < plain.ber, rate
                strict += 1
            else:
                assert tr.n_errors == 0, rate
        assert strict > 0

    def test_transmit_noise_reference(self, cavity_cir):
        c = config(SchemeKind.BPSK, snr=10.0, tr=True, channel=cavity_cir, n_bits=200,
                   noise_reference=NoiseReference.TRANSMIT_SIGNAL_POWER)
        # BPSK symbols have unit power
        assert run_trial(c).noise_sigma == pytest.approx(10 ** -0.5)
        rx = run_trial(config(SchemeKind.BPSK, snr=10.0, tr=True, channel=cavity_cir, n_bits=200))
        assert rx.noise_sigma != pytest.approx(10 ** -0.5)

    def test_delta_a_and_stat_sigma_noiseless(self):
        r = run_trial(config(SchemeKind.CW_ASK, snr=math.inf))
        assert r.delta_a == pytest.approx(0.5)
        assert r.stat_sigma == pytest.approx(0.0, abs=1e-12)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            config(n_bits=0)
        with pytest.raises(DomainError):
            config(rate=-1.0)

    @given(st.integers(0, 2 ** 32), st.sampled_from(list(SchemeKind)))
    def test_ber_in_unit_interval(self, seed, kind):
        r = run_trial(config(kind, snr=-3.0, n_bits=64, seed=seed))
        assert 0 <= r.n_errors <= r.n_bits
        assert r.ber == r.n_errors / r.n_bits

    def test_run_trials_independent_of_jobs(self, cavity_cir):
        cs = [config(rate=20e9, snr=4.0, tr=bool(i % 2), seed=i, channel=cavity_cir, n_bits=300)
              for i in range(4)]
        assert run_trials(cs, n_jobs=1) == run_trials(cs, n_jobs=2)


class TestProbe:
    def test_identical_victim_has_equal_power(self, cavity_cir):
        res = run_interference_probe(config(tr=True, channel=cavity_cir), [cavity_cir])
        assert res.victim_powers[0] == pytest.approx(res.intended_power)
        assert res.suppression_db == pytest.approx(0.0, abs=1e-9)

    def test_disjoint_victim(self):
        h = ChannelImpulseResponse([1, 1, 0, 0], FS)
        v = ChannelImpulseResponse([0, 0, 1, 1], FS)
        res = run_interference_probe(config(tr=True, channel=h), [v], metric="focus")
        assert res.victim_powers[0] == pytest.approx(0.0, abs=1e-30)
        assert res.intended_power == pytest.approx(2.0)

    def test_peak_power_is_energy(self, cavity_cir):
        res = run_interference_probe(config(tr=True, channel=cavity_cir), [IDENTITY])
        assert res.intended_power == pytest.approx(cavity_cir.energy, rel=1e-12)

    def test_errors(self, cavity_cir):
        with pytest.raises(DomainError):
            run_interference_probe(config(tr=True, channel=cavity_cir), [])
        with pytest.raises(DomainError):
            run_interference_probe(config(tr=False, channel=cavity_cir), [cavity_cir])
        with pytest.raises(DomainError):
            run_interference_probe(config(tr=True, channel=cavity_cir), [cavity_cir], metric="avg")
        with pytest.raises(SampleRateMismatchError):
            run_interference_probe(config(tr=True, channel=cavity_cir),
                                   [ChannelImpulseResponse([1], 1e9)])
