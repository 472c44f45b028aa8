#include "rfsizer/rfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "rfsizer/errors.hpp"

namespace rfsizer {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::domain_error(std::string(name) + " must be finite and > 0, got " +
                                format_compact(v));
}

// Slices a system ParamVector into one of its constituent blocks.
ParamVector slice_params(const ParamVector& p, BlockId part, std::size_t offset) {
    const auto& part_schema = schema(part);
    std::vector<double> v(p.values.begin() + offset,
                          p.values.begin() + offset + part_schema.params.size());
    return ParamVector{part, std::move(v)};
}

}  // namespace

double friis_received_power(double pt_w, double gt, double gr, double fc_hz, double d_m) {
    require_positive(pt_w, "pt");
    require_positive(gt, "gt");
    require_positive(gr, "gr");
    require_positive(fc_hz, "fc");
    require_positive(d_m, "d");
    const double bracket = kSpeedOfLight / (2.0 * kPi * fc_hz * d_m);
    return pt_w * gt * gr * bracket * bracket;
}

double sensitivity_dbm(double nf_db, double delta_f_hz, double snr_out_db) {
    require_positive(delta_f_hz, "delta_f");
    return -174.0 + nf_db + 10.0 * std::log10(delta_f_hz) + snr_out_db;
}

double cascade_noise_factor(std::span<const double> stage_f, std::span<const double> stage_gain) {
    if (stage_f.empty()) throw std::domain_error("cascade_noise_factor: no stages");
    if (stage_gain.size() + 1 != stage_f.size())
        throw std::domain_error("cascade_noise_factor: need one gain per front stage");
    double total = stage_f[0];
    double gain_product = 1.0;
    for (std::size_t i = 1; i < stage_f.size(); ++i) {
        require_positive(stage_gain[i - 1], "stage gain");
        if (stage_f[i] < 1.0)
            throw std::domain_error("stage noise factor must be >= 1");
        gain_product *= stage_gain[i - 1];
        total += (stage_f[i] - 1.0) / gain_product;
    }
    return total;
}

SpecVector eval_vco(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op) {
    if (p.block != BlockId::vco) throw SchemaError("eval_vco: got block " + block_name(p.block));
    p.validate();

    const double c_tank = p.si("C");
    const double l_tank = p.si("L");
    const double r_p = p.si("R_p");
    const double w_n1 = p.si("W_N1");
    const double w_n2 = p.si("W_N2");
    const double w_var = p.si("W_var");

    // Startup: the cross-coupled pair must overcome the tank loss.
    const double gm = dc.k_gm * w_n1;
    if (gm * r_p < 1.0)
        throw OscillationFailure("oscillation startup condition gm*R_p >= 1 violated (gm*R_p = " +
                                 format_compact(gm * r_p) + ") at " + p.describe());

    const double c_var1 = dc.k_var_min * w_var;
    const double c_var2 = dc.k_var_max * w_var;

    const double tuning_range_hz =
        (1.0 / (2.0 * kPi)) * (1.0 / std::sqrt(l_tank * c_tank)) * (c_var2 - c_var1) / (2.0 * c_tank);

    // Carrier at the mid-tuning capacitance.
    const double omega0 = 1.0 / std::sqrt(l_tank * (c_tank + 0.5 * (c_var1 + c_var2)));
    const double q_tank = r_p / (omega0 * l_tank);

    const double i_bias = dc.j_bias * w_n2;
    const double v_swing = std::min((4.0 / kPi) * i_bias * r_p, 1.2 * dc.vdd);
    const double p_sig = v_swing * v_swing / (2.0 * r_p);

    const double noise_factor = 1.0 + dc.gamma_noise;
    const double d_omega = 2.0 * kPi * op.pn_offset;
    const double lorentzian = omega0 / (2.0 * q_tank * d_omega);
    const double phase_noise_db =
        10.0 * std::log10((2.0 * noise_factor * dc.kT / p_sig) * (1.0 + lorentzian * lorentzian) *
                          (1.0 + dc.flicker_corner / std::abs(d_omega)));

    return SpecVector{BlockId::vco, {phase_noise_db, tuning_range_hz}};
}

namespace detail {

double rapp_output_w(double gain_linear, double psat_w, double pin_w) {
    const double driven = gain_linear * pin_w;
    const double x = driven / psat_w;
    return driven / std::sqrt(1.0 + x * x);
}

double PaOperatingCurves::drain_eff_at(double pin_w) const {
    return rapp_output_w(gain_linear, psat_w, pin_w) / pdc_w * 100.0;
}

double PaOperatingCurves::pae_at(double pin_w) const {
    return (rapp_output_w(gain_linear, psat_w, pin_w) - pin_w) / pdc_w * 100.0;
}

PaOperatingCurves pa_curves(const ParamVector& p, const DeviceConstants& dc,
                            const OperatingPoint& op) {
    const double omega = 2.0 * kPi * op.f_rf;

    // Transformer-coupled stage: gm * (w*Lp*Q) * k * sqrt(Ls/Lp).
    auto stage_gain = [&](double gm, double l_p, double l_s) {
        return gm * (omega * l_p * dc.q_xfmr) * dc.k_couple * std::sqrt(l_s / l_p);
    };
    const double av1 = stage_gain(dc.k_gm * p.si("W_N1"), p.si("L_ip"), p.si("L_is"));
    const double av2 = stage_gain(dc.k_gm * p.si("W_N2"), p.si("L_op"), p.si("L_os"));

    PaOperatingCurves c;
    c.gain_linear = (av1 * av2) * (av1 * av2);
    c.pdc_w = pa_dc_power_w(p, dc);
    c.psat_w = (2.0 / kPi) * dc.j_bias * p.si("W_N2") * dc.vdd;
    return c;
}

double vco_dc_power_w(const ParamVector& p, const DeviceConstants& dc) {
    return dc.vdd * dc.j_bias * p.si("W_N2");
}

double pa_dc_power_w(const ParamVector& p, const DeviceConstants& dc) {
    // Two differential half-circuits per stage.
    return dc.vdd * dc.j_bias * 2.0 * (p.si("W_N1") + p.si("W_N2"));
}

double vco_signal_power_w(const ParamVector& p, const DeviceConstants& dc) {
    const double r_p = p.si("R_p");
    const double i_bias = dc.j_bias * p.si("W_N2");
    const double v_swing = std::min((4.0 / kPi) * i_bias * r_p, 1.2 * dc.vdd);
    return v_swing * v_swing / (2.0 * r_p);
}

double lna_noise_factor(double w_n1_m, const DeviceConstants& dc, const OperatingPoint& op) {
    const double gm = dc.k_gm * w_n1_m;
    const double c_gs = dc.k_cgs * w_n1_m;
    const double omega = 2.0 * kPi * op.f_rf;
    const double ratio = omega * c_gs / gm;  // omega/omega_T
    return 1.0 + dc.gamma_noise * gm * dc.z0 * ratio * ratio;
}

double gm_stage_noise_factor(double w_n1_m, const DeviceConstants& dc) {
    return 1.0 + dc.gamma_noise / (dc.k_gm * w_n1_m * dc.z0);
}

}  // namespace detail

SpecVector eval_pa(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op) {
    if (p.block != BlockId::pa) throw SchemaError("eval_pa: got block " + block_name(p.block));
    p.validate();

    const auto curves = detail::pa_curves(p, dc, op);
    const double power_gain_db = 10.0 * std::log10(curves.gain_linear);

    // Efficiency metrics are the sweep maxima, mirroring single-number
    // reductions of swept large-signal measurements.
    const int n_points = static_cast<int>(std::floor(
                             (op.pa_pin_stop_dbm - op.pa_pin_start_dbm) / op.pa_pin_step_db +
                             1e-9)) + 1;
    double best_eff = -std::numeric_limits<double>::infinity();
    double best_pae = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_points; ++k) {
        const double pin_w = watts_from_dbm(op.pa_pin_start_dbm + k * op.pa_pin_step_db);
        best_eff = std::max(best_eff, curves.drain_eff_at(pin_w));
        best_pae = std::max(best_pae, curves.pae_at(pin_w));
    }

    return SpecVector{BlockId::pa, {power_gain_db, best_eff, best_pae}};
}

SpecVector eval_lna(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op) {
    if (p.block != BlockId::lna) throw SchemaError("eval_lna: got block " + block_name(p.block));
    p.validate();

    const double omega = 2.0 * kPi * op.f_rf;
    const double w_n1 = p.si("W_N1");
    const double gm = dc.k_gm * w_n1;
    const double c_gs = dc.k_cgs * w_n1;

    // Inductively degenerated input: real part set by Ls, reactance by the
    // gate chain (Lg + Ls in series with Cgs and the coupling cap C2).
    const double r_in = gm * p.si("L_s") / c_gs;
    const double x_in = omega * (p.si("L_g") + p.si("L_s")) - 1.0 / (omega * c_gs) -
                        1.0 / (omega * p.si("C_2"));
    const std::complex<double> z_in{r_in, x_in};

    const std::complex<double> gamma_in = (z_in - dc.z0) / (z_in + dc.z0);
    double s11_db = kS11FloorDb;
    if (std::abs(gamma_in) > 0.0)
        s11_db = std::max(20.0 * std::log10(std::abs(gamma_in)), kS11FloorDb);

    const double r_d_eff = omega * p.si("L_d") * dc.q_ind;
    const double denom = (omega * c_gs) * (omega * c_gs) *
                         ((dc.z0 + r_in) * (dc.z0 + r_in) + x_in * x_in);
    double gain_linear = 4.0 * dc.z0 * r_d_eff * gm * gm / denom;

    // Transducer-gain termination factors; identity at the default matched
    // terminations. The stage is treated as unilateral with a matched output.
    if (std::abs(op.lna_gamma_s) > 0.0 || std::abs(op.lna_gamma_l) > 0.0) {
        const double gs2 = std::norm(op.lna_gamma_s);
        const double gl2 = std::norm(op.lna_gamma_l);
        gain_linear *= (1.0 - gs2) / std::norm(1.0 - gamma_in * op.lna_gamma_s) * (1.0 - gl2);
    }
    const double power_gain_db = 10.0 * std::log10(gain_linear);

    const double nf_db = 10.0 * std::log10(detail::lna_noise_factor(w_n1, dc, op));

    return SpecVector{BlockId::lna, {power_gain_db, s11_db, nf_db}};
}

SpecVector eval_mixer(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op) {
    if (p.block != BlockId::mixer) throw SchemaError("eval_mixer: got block " + block_name(p.block));
    p.validate();

    const double gm = dc.k_gm * p.si("W_N1");
    const double r_load = p.si("R");
    const double c_load = p.si("C");

    const double gain_raw = (2.0 / kPi) * gm * r_load;
    // RC load low-pass seen by the IF tone.
    const double f_corner = 1.0 / (2.0 * kPi * r_load * c_load);
    const double ratio = op.f_if / f_corner;
    const double gain_if = gain_raw / std::sqrt(1.0 + ratio * ratio);

    const double conversion_gain_db = 20.0 * std::log10(gain_if);

    // Differential output swing, clipped by the tail-current limit.
    const double i_ss = dc.j_bias * 2.0 * p.si("W_N1");
    const double swing = std::min(2.0 * gain_if * op.mixer_vin_amp, 2.0 * i_ss * r_load);

    return SpecVector{BlockId::mixer, {swing, conversion_gain_db}};
}

SpecVector eval_cascode(const ParamVector& p, const DeviceConstants& dc) {
    if (p.block != BlockId::cascode)
        throw SchemaError("eval_cascode: got block " + block_name(p.block));
    p.validate();
    const double gain_db = 20.0 * std::log10(dc.k_gm * p.si("W_N1") * p.si("R_D"));
    return SpecVector{BlockId::cascode, {gain_db}};
}

SpecVector eval_tx_system(const ParamVector& p, const DeviceConstants& dc,
                          const OperatingPoint& op) {
    if (p.block != BlockId::tx_system)
        throw SchemaError("eval_tx_system: got block " + block_name(p.block));
    p.validate();

    const ParamVector vco = slice_params(p, BlockId::vco, 0);
    const ParamVector pa = slice_params(p, BlockId::pa, schema(BlockId::vco).params.size());

    eval_vco(vco, dc, op);  // propagates OscillationFailure

    const double p_vco_w = detail::vco_signal_power_w(vco, dc);
    const auto pa_c = detail::pa_curves(pa, dc, op);
    const double p_out_w = detail::rapp_output_w(pa_c.gain_linear, pa_c.psat_w, p_vco_w);

    const double dc_power_w = detail::vco_dc_power_w(vco, dc) + detail::pa_dc_power_w(pa, dc);
    const double bandwidth_hz = op.f_rf / dc.q_xfmr;
    const double output_power_dbm = dbm_from_watts(p_out_w);
    const double swing_v = 2.0 * std::sqrt(2.0 * dc.z0 * p_out_w);

    return SpecVector{BlockId::tx_system, {dc_power_w, bandwidth_hz, output_power_dbm, swing_v}};
}

SpecVector eval_rx_system(const ParamVector& p, const DeviceConstants& dc,
                          const OperatingPoint& op) {
    if (p.block != BlockId::rx_system)
        throw SchemaError("eval_rx_system: got block " + block_name(p.block));
    p.validate();

    const std::size_t n_lna = schema(BlockId::lna).params.size();
    const std::size_t n_mix = schema(BlockId::mixer).params.size();
    const ParamVector lna = slice_params(p, BlockId::lna, 0);
    const ParamVector mixer = slice_params(p, BlockId::mixer, n_lna);
    const ParamVector cascode = slice_params(p, BlockId::cascode, n_lna + n_mix);

    const SpecVector lna_s = eval_lna(lna, dc, op);
    const SpecVector mixer_s = eval_mixer(mixer, dc, op);
    const SpecVector cascode_s = eval_cascode(cascode, dc);

    const double gain_db =
        lna_s["power_gain"] + mixer_s["conversion_gain"] + cascode_s["gain"];

    const double stage_f[3] = {detail::lna_noise_factor(lna.si("W_N1"), dc, op),
                               detail::gm_stage_noise_factor(mixer.si("W_N1"), dc),
                               detail::gm_stage_noise_factor(cascode.si("W_N1"), dc)};
    const double stage_g[2] = {power_ratio_from_db(lna_s["power_gain"]),
                               power_ratio_from_db(mixer_s["conversion_gain"])};
    const double nf_db = 10.0 * std::log10(cascade_noise_factor(stage_f, stage_g));

    // Differential LNA and mixer, single-ended tail for the IF amplifier.
    const double dc_power_w =
        dc.vdd * dc.j_bias * (2.0 * lna.si("W_N1") + 2.0 * mixer.si("W_N1") + cascode.si("W_N1"));

    return SpecVector{BlockId::rx_system, {dc_power_w, gain_db, nf_db}};
}

SpecVector eval_block(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op) {
    switch (p.block) {
        case BlockId::vco: return eval_vco(p, dc, op);
        case BlockId::pa: return eval_pa(p, dc, op);
        case BlockId::lna: return eval_lna(p, dc, op);
        case BlockId::mixer: return eval_mixer(p, dc, op);
        case BlockId::cascode: return eval_cascode(p, dc);
        case BlockId::tx_system: return eval_tx_system(p, dc, op);
        case BlockId::rx_system: return eval_rx_system(p, dc, op);
    }
    throw SchemaError("eval_block: unknown block id");
}

}  // namespace rfsizer
