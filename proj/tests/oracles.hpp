#pragma once

// Independent closed-form oracles for the block models, written as direct
// one-shot transcriptions of the documented equations with no shared code
// with the library. Unit handling is inlined (fF/pH/um scale factors) so a
// unit-conversion bug in the library cannot hide here.

#include <algorithm>
#include <cmath>

namespace oracle {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Default behavioral constants, restated by hand.
inline constexpr double k_gm = 1e-3 / 1e-6;       // 1.0 mS/um in S/m
inline constexpr double k_cgs = 1e-15 / 1e-6;     // 1.0 fF/um in F/m
inline constexpr double k_var_min = 0.6e-15 / 1e-6;
inline constexpr double k_var_max = 1.4e-15 / 1e-6;
inline constexpr double j_bias = 0.05e-3 / 1e-6;  // 0.05 mA/um in A/m
inline constexpr double gamma_noise = 1.3;
inline constexpr double vdd = 1.2;
inline constexpr double z0 = 50.0;
inline constexpr double q_ind = 15.0;
inline constexpr double q_xfmr = 10.0;
inline constexpr double k_couple = 0.8;
inline constexpr double kT = 4.0035e-21;
inline const double flicker_corner = 2.0 * pi * 100e3;  // rad/s
inline constexpr double f_rf = 28e9;
inline constexpr double f_if = 100e6;
inline constexpr double pn_offset = 1e6;
inline constexpr double mixer_vin = 0.05;

inline double friis_w(double pt, double gt, double gr, double fc, double d) {
    const double c = 2.99792458e8;
    const double b = c / (2.0 * pi * fc * d);
    return pt * gt * gr * b * b;
}

// frequency span in Hz for C [fF], L [pH], W_var [um]
inline double vco_tuning_hz(double c_ff, double l_ph, double wvar_um) {
    const double c = c_ff * 1e-15, l = l_ph * 1e-12, w = wvar_um * 1e-6;
    const double dC = k_var_max * w - k_var_min * w;
    return (1.0 / (2.0 * pi)) * (1.0 / std::sqrt(l * c)) * dC / (2.0 * c);
}

// dBc/Hz at the 1 MHz offset for table-unit inputs
inline double vco_phase_noise_db(double c_ff, double l_ph, double rp, double wn2_um,
                                 double wvar_um) {
    const double c = c_ff * 1e-15, l = l_ph * 1e-12;
    const double cv1 = k_var_min * wvar_um * 1e-6, cv2 = k_var_max * wvar_um * 1e-6;
    const double w0 = 1.0 / std::sqrt(l * (c + (cv1 + cv2) / 2.0));
    const double q = rp / (w0 * l);
    const double ib = j_bias * wn2_um * 1e-6;
    const double vsw = std::min(4.0 / pi * ib * rp, 1.2 * vdd);
    const double psig = vsw * vsw / (2.0 * rp);
    const double dw = 2.0 * pi * pn_offset;
    const double f = 1.0 + gamma_noise;
    const double lor = w0 / (2.0 * q * dw);
    return 10.0 * std::log10(2.0 * f * kT / psig * (1.0 + lor * lor) *
                             (1.0 + flicker_corner / dw));
}

struct PaSpecs {
    double gain_db, drain_eff_pct, pae_pct;
};

// inductors in pH, widths in um; efficiency maxima over -30..+10 dBm
inline PaSpecs pa_specs(double lip, double lis, double lop, double los, double wn1, double wn2) {
    const double w = 2.0 * pi * f_rf;
    const double av1 = k_gm * wn1 * 1e-6 * (w * lip * 1e-12 * q_xfmr) * k_couple *
                       std::sqrt(lis / lip);
    const double av2 = k_gm * wn2 * 1e-6 * (w * lop * 1e-12 * q_xfmr) * k_couple *
                       std::sqrt(los / lop);
    const double g = (av1 * av2) * (av1 * av2);
    const double pdc = vdd * j_bias * 2.0 * (wn1 + wn2) * 1e-6;
    const double psat = 2.0 / pi * j_bias * wn2 * 1e-6 * vdd;
    double best_eff = -1e300, best_pae = -1e300;
    for (int dbm = -30; dbm <= 10; ++dbm) {
        const double pin = 1e-3 * std::pow(10.0, dbm / 10.0);
        const double pout = g * pin / std::sqrt(1.0 + (g * pin / psat) * (g * pin / psat));
        best_eff = std::max(best_eff, pout / pdc * 100.0);
        best_pae = std::max(best_pae, (pout - pin) / pdc * 100.0);
    }
    return {10.0 * std::log10(g), best_eff, best_pae};
}

struct LnaSpecs {
    double gain_db, s11_db, nf_db;
};

// capacitors in fF, inductors in pH, widths in um
inline LnaSpecs lna_specs(double c2_ff, double ld_ph, double lg_ph, double ls_ph, double wn1_um) {
    const double w = 2.0 * pi * f_rf;
    const double gm = k_gm * wn1_um * 1e-6;
    const double cgs = k_cgs * wn1_um * 1e-6;
    const double rin = gm * ls_ph * 1e-12 / cgs;
    const double xin = w * (lg_ph + ls_ph) * 1e-12 - 1.0 / (w * cgs) - 1.0 / (w * c2_ff * 1e-15);
    const double num = std::hypot(rin - z0, xin);
    const double den = std::hypot(rin + z0, xin);
    const double s11 = std::max(20.0 * std::log10(num / den), -200.0);
    const double rd = w * ld_ph * 1e-12 * q_ind;
    const double gain = 10.0 * std::log10(4.0 * z0 * rd * gm * gm /
                                          ((w * cgs) * (w * cgs) *
                                           ((z0 + rin) * (z0 + rin) + xin * xin)));
    const double ratio = w * cgs / gm;
    const double nf = 10.0 * std::log10(1.0 + gamma_noise * gm * z0 * ratio * ratio);
    return {gain, s11, nf};
}

struct MixerSpecs {
    double swing_v, conv_gain_db;
};

// C in pF, R in ohm, width in um
inline MixerSpecs mixer_specs(double c_pf, double r, double wn1_um) {
    const double gm = k_gm * wn1_um * 1e-6;
    const double a = 2.0 / pi * gm * r;
    const double fc = 1.0 / (2.0 * pi * r * c_pf * 1e-12);
    const double ap = a / std::sqrt(1.0 + (f_if / fc) * (f_if / fc));
    const double iss = j_bias * 2.0 * wn1_um * 1e-6;
    return {std::min(2.0 * ap * mixer_vin, 2.0 * iss * r), 20.0 * std::log10(ap)};
}

inline double cascode_gain_db(double rd, double wn1_um) {
    return 20.0 * std::log10(k_gm * wn1_um * 1e-6 * rd);
}

struct TxSpecs {
    double dc_power_w, bandwidth_hz, output_power_dbm, swing_v;
};

inline TxSpecs tx_specs(double rp, double vco_wn2_um, double lip, double lis, double lop,
                        double los, double pa_wn1_um, double pa_wn2_um) {
    const double ib = j_bias * vco_wn2_um * 1e-6;
    const double vsw = std::min(4.0 / pi * ib * rp, 1.2 * vdd);
    const double pvco = vsw * vsw / (2.0 * rp);
    const double w = 2.0 * pi * f_rf;
    const double av1 = k_gm * pa_wn1_um * 1e-6 * (w * lip * 1e-12 * q_xfmr) * k_couple *
                       std::sqrt(lis / lip);
    const double av2 = k_gm * pa_wn2_um * 1e-6 * (w * lop * 1e-12 * q_xfmr) * k_couple *
                       std::sqrt(los / lop);
    const double g = (av1 * av2) * (av1 * av2);
    const double psat = 2.0 / pi * j_bias * pa_wn2_um * 1e-6 * vdd;
    const double pout = g * pvco / std::sqrt(1.0 + (g * pvco / psat) * (g * pvco / psat));
    TxSpecs s;
    s.dc_power_w = vdd * j_bias * vco_wn2_um * 1e-6 +
                   vdd * j_bias * 2.0 * (pa_wn1_um + pa_wn2_um) * 1e-6;
    s.bandwidth_hz = f_rf / q_xfmr;
    s.output_power_dbm = 10.0 * std::log10(pout / 1e-3);
    s.swing_v = 2.0 * std::sqrt(2.0 * z0 * pout);
    return s;
}

struct RxSpecs {
    double dc_power_w, gain_db, nf_db;
};

inline RxSpecs rx_specs(double c2_ff, double ld_ph, double lg_ph, double ls_ph, double lna_wn1,
                        double mix_c_pf, double mix_r, double mix_wn1, double casc_rd,
                        double casc_wn1) {
    const LnaSpecs lna = lna_specs(c2_ff, ld_ph, lg_ph, ls_ph, lna_wn1);
    const MixerSpecs mix = mixer_specs(mix_c_pf, mix_r, mix_wn1);
    const double casc = cascode_gain_db(casc_rd, casc_wn1);

    const double f1 = std::pow(10.0, lna.nf_db / 10.0);
    const double f2 = 1.0 + gamma_noise / (k_gm * mix_wn1 * 1e-6 * z0);
    const double f3 = 1.0 + gamma_noise / (k_gm * casc_wn1 * 1e-6 * z0);
    const double g1 = std::pow(10.0, lna.gain_db / 10.0);
    const double g2 = std::pow(10.0, mix.conv_gain_db / 10.0);

    RxSpecs s;
    s.gain_db = lna.gain_db + mix.conv_gain_db + casc;
    s.nf_db = 10.0 * std::log10(f1 + (f2 - 1.0) / g1 + (f3 - 1.0) / (g1 * g2));
    s.dc_power_w = vdd * j_bias * (2.0 * lna_wn1 + 2.0 * mix_wn1 + casc_wn1) * 1e-6;
    return s;
}

}  // namespace oracle
