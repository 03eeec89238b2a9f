"""Cost model: rate, delays, energies, feasibility, profile I/O."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitedge.bundled import DEFAULT_DEVICE, DEFAULT_RADIO, DEFAULT_SERVER, vgg19_synthetic_profile
from splitedge.system_model import (Budget, DeviceSpec, LayerProfile, RadioSpec, ServerSpec,
                                    SplitConfig, ZeroRate, achievable_rate, compute_delays,
                                    cost_arrays, dbm_per_hz_to_watts_per_hz, evaluate_cost,
                                    load_profile, local_compute_energy, transmission_delay,
                                    transmission_energy, write_profile)

# Reference values below were computed with mpmath at 30 digits straight from
# the Shannon-rate and delay/energy formulas, independently of this package.
RATE_P038_G1E10 = 23222382.6857538538291795573927
G_REF = 10 ** (-101.5 / 10)
LAYER7 = dict(rate=17189281.5473518030255338037909, tau_t=2.98908502129431267066620503889,
              e_t=1.13585230809183881485315791478, e_c=0.0930682109952,
              tau_dev=1.59581980444444444444444444444, tau_srv=0.372901341866666666666666666667)


class TestNoiseAndRate:
    def test_dbm_conversion(self):
        assert dbm_per_hz_to_watts_per_hz(30.0) == pytest.approx(1.0)
        assert dbm_per_hz_to_watts_per_hz(-147.0) == pytest.approx(1.99526231496888e-18, rel=1e-12)

    def test_zero_power_gives_zero_rate(self):
        assert achievable_rate(0.0, 1e-10, DEFAULT_RADIO) == 0.0
        assert achievable_rate(0.3, 0.0, DEFAULT_RADIO) == 0.0

    def test_unit_snr_gives_one_bit(self):
        # B = 1 Hz and N0*B = 1 W  ->  log2(2) = 1 bit/s
        radio = RadioSpec(bandwidth_hz=1.0, noise_psd_dbm_hz=30.0)
        assert achievable_rate(1.0, 1.0, radio) == pytest.approx(1.0, rel=1e-15)

    def test_paper_constants_hand_value(self):
        r = achievable_rate(0.38, 1e-10, DEFAULT_RADIO)
        assert r == pytest.approx(RATE_P038_G1E10, rel=1e-12)

    @given(st.floats(0.01, 1.0), st.floats(0.01, 1.0), st.floats(-120, -80))
    def test_monotone_in_power_and_gain(self, p1, p2, g_db):
        g = 10 ** (g_db / 10)
        lo, hi = sorted((p1, p2))
        assert achievable_rate(lo, g, DEFAULT_RADIO) <= achievable_rate(hi, g, DEFAULT_RADIO)
        assert achievable_rate(lo, g, DEFAULT_RADIO) <= achievable_rate(lo, g * 1.5, DEFAULT_RADIO)


class TestLayerCosts:
    profile = vgg19_synthetic_profile()

    def test_layer7_payload_from_first_principles(self):
        # relu2_1 output: 112 x 112 x 128 FP32 values
        assert self.profile.payload_bits(7) == 112 * 112 * 128 * 32

    def test_vgg19_total_macs(self):
        # VGG19 at 224x224 is commonly quoted at about 19.6 GMACs
        assert sum(self.profile.macs) == pytest.approx(19.6e9, rel=0.01)

    def test_layer7_against_reference(self):
        cfg = SplitConfig(7, 0.38)
        tau_t = transmission_delay(cfg, G_REF, self.profile, DEFAULT_RADIO)
        assert tau_t == pytest.approx(LAYER7["tau_t"], rel=1e-12)
        assert transmission_energy(cfg, tau_t) == pytest.approx(LAYER7["e_t"], rel=1e-12)
        assert local_compute_energy(cfg, self.profile, DEFAULT_DEVICE) == \
            pytest.approx(LAYER7["e_c"], rel=1e-12)
        dev, srv = compute_delays(cfg, self.profile, DEFAULT_DEVICE, DEFAULT_SERVER)
        assert dev == pytest.approx(LAYER7["tau_dev"], rel=1e-12)
        assert srv == pytest.approx(LAYER7["tau_srv"], rel=1e-12)

    def test_evaluate_cost_aggregates(self):
        c = evaluate_cost(SplitConfig(7, 0.38), G_REF, self.profile, DEFAULT_DEVICE,
                          DEFAULT_SERVER, DEFAULT_RADIO, Budget())
        assert c.delay_s == pytest.approx(LAYER7["tau_t"] + LAYER7["tau_dev"] + LAYER7["tau_srv"],
                                          rel=1e-12)
        assert c.energy_j == pytest.approx(LAYER7["e_t"] + LAYER7["e_c"], rel=1e-12)
        assert c.feasible

    def test_zero_rate_raises_and_prices_infinite(self):
        cfg = SplitConfig(3, 0.3)
        with pytest.raises(ZeroRate):
            transmission_delay(cfg, 0.0, self.profile, DEFAULT_RADIO)
        c = evaluate_cost(cfg, 0.0, self.profile, DEFAULT_DEVICE, DEFAULT_SERVER,
                          DEFAULT_RADIO, Budget())
        assert math.isinf(c.tau_transmit_s) and not c.feasible

    def test_last_layer_sends_smallest_payload(self):
        bits = self.profile.activation_bits
        assert bits[-1] == min(bits)


class TestToyFeasibility:
    """5 layers x 4 powers, enumerated against a direct re-derivation."""

    profile = LayerProfile(macs=(2e9, 1e9, 3e9, 5e8, 1e9),
                           activation_bits=(8e7, 4e7, 2e7, 1e7, 8e4), input_bits=1e8)
    device = DeviceSpec(freq_hz=1.8e9, kappa=1e-29, eta=1.0, p_min_w=0.1, p_max_w=0.5)
    server = ServerSpec(freq_hz=4.5e9, eta=1.0)
    radio = RadioSpec()
    budget = Budget(5.0, 5.0)
    gain = 1e-10

    def reference(self, layer, p):
        n0 = 10 ** ((-147 - 30) / 10)
        B = 240000 * 256 * 0.8
        rate = B * math.log2(1 + p * self.gain / (n0 * B))
        tt = self.profile.activation_bits[layer - 1] / rate
        dev = sum(self.profile.macs[:layer]) / 1.8e9
        srv = sum(self.profile.macs[layer:]) / 4.5e9
        energy = sum(1e-29 * m * 1.8e9 ** 2 for m in self.profile.macs[:layer]) + p * tt
        return energy <= 5.0 and tt + dev + srv <= 5.0

    def test_enumeration(self):
        powers = np.linspace(0.1, 0.5, 4)
        got = [[evaluate_cost(SplitConfig(l, float(p)), self.gain, self.profile, self.device,
                              self.server, self.radio, self.budget).feasible for p in powers]
               for l in range(1, 6)]
        want = [[self.reference(l, float(p)) for p in powers] for l in range(1, 6)]
        assert got == want
        # the toy is only interesting if both outcomes occur
        assert any(map(any, got)) and not all(map(all, got))

    def test_vectorized_matches_scalar(self):
        layers = np.repeat(np.arange(1, 6), 4)
        powers = np.tile(np.linspace(0.1, 0.5, 4), 5)
        energy, delay = cost_arrays(layers, powers, self.gain, self.profile, self.device,
                                    self.server, self.radio)
        for l, p, e, d in zip(layers, powers, energy, delay):
            c = evaluate_cost(SplitConfig(int(l), float(p)), self.gain, self.profile,
                              self.device, self.server, self.radio, self.budget)
            assert e == pytest.approx(c.energy_j, rel=1e-12)
            assert d == pytest.approx(c.delay_s, rel=1e-12)


@settings(max_examples=60)
@given(st.integers(1, 37), st.floats(0.1, 0.5), st.floats(-110, -90))
def test_delay_terms_nonnegative_and_split_consistent(layer, p, g_db):
    prof = vgg19_synthetic_profile()
    c = evaluate_cost(SplitConfig(layer, p), 10 ** (g_db / 10), prof, DEFAULT_DEVICE,
                      DEFAULT_SERVER, DEFAULT_RADIO, Budget())
    assert min(c.tau_device_s, c.tau_server_s, c.tau_transmit_s, c.e_compute_j,
               c.e_transmit_j) >= 0
    assert c.feasible == (c.energy_j <= 5.0 and c.delay_s <= 5.0)


class TestValidation:
    def test_split_config_range(self):
        with pytest.raises(ValueError):
            SplitConfig(0, 0.2).validate(37, 0.1, 0.5)
        with pytest.raises(ValueError):
            SplitConfig(3, 0.6).validate(37, 0.1, 0.5)

    def test_device_power_order(self):
        with pytest.raises(ValueError):
            DeviceSpec(p_min_w=0.5, p_max_w=0.1)

    def test_profile_lengths(self):
        with pytest.raises(ValueError):
            LayerProfile((1.0, 2.0), (1.0,), input_bits=1.0)


def test_profile_roundtrip(tmp_path):
    prof = vgg19_synthetic_profile()
    path = tmp_path / "p.csv"
    write_profile(prof, path)
    again = load_profile(path)
    assert again == prof


def test_compute_conservation_and_monotonicity():
    """tau_dev*f*eta + tau_srv*f'*eta' recovers the total MACs at every split."""
    prof = vgg19_synthetic_profile()
    total = sum(prof.macs)
    dev_prev, srv_prev, e_prev = -1.0, math.inf, -1.0
    for layer in range(1, prof.n_layers + 1):
        cfg = SplitConfig(layer, 0.3)
        dev, srv = compute_delays(cfg, prof, DEFAULT_DEVICE, DEFAULT_SERVER)
        back = dev * DEFAULT_DEVICE.freq_hz * DEFAULT_DEVICE.eta + \
            srv * DEFAULT_SERVER.freq_hz * DEFAULT_SERVER.eta
        assert back == pytest.approx(total, rel=1e-12)
        e = local_compute_energy(cfg, prof, DEFAULT_DEVICE)
        assert dev >= dev_prev and srv <= srv_prev and e >= e_prev
        dev_prev, srv_prev, e_prev = dev, srv, e
    assert srv_prev == 0.0


def test_single_layer_energy_hand_value():
    # kappa * alpha * f^2 = 1e-29 * 1e9 * (1.8e9)^2
    prof = LayerProfile((1e9,), (1e6,), input_bits=1e6)
    assert local_compute_energy(SplitConfig(1, 0.3), prof, DEFAULT_DEVICE) == \
        pytest.approx(0.0324, rel=1e-12)
