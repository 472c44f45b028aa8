#pragma once

#include <span>

#include "rfsizer/device.hpp"
#include "rfsizer/vectors.hpp"

namespace rfsizer {

// Analytic forward model: closed-form behavioral equations mapping circuit
// parameters to performance metrics. All functions are pure and safe to call
// concurrently. The complete set of equations is documented in
// docs/behavioral_models.md; swap in an external simulator through the
// adapter contract in oceangen.hpp to replace them wholesale.

// Free-space received power: pt*gt*gr*(c/(2*pi*fc*d))^2.
double friis_received_power(double pt_w, double gt, double gr, double fc_hz, double d_m);

// Minimum detectable input level: -174 + NF + 10*log10(df) + SNR_out, in dBm.
double sensitivity_dbm(double nf_db, double delta_f_hz, double snr_out_db);

// Cascade noise factor over stages with linear noise factors F and linear
// available power gains G (G.size() == F.size() - 1):
//   F_total = F1 + (F2-1)/G1 + (F3-1)/(G1*G2) + ...
double cascade_noise_factor(std::span<const double> stage_f, std::span<const double> stage_gain);

SpecVector eval_vco(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op);
SpecVector eval_pa(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op);
SpecVector eval_lna(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op);
SpecVector eval_mixer(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op);
SpecVector eval_cascode(const ParamVector& p, const DeviceConstants& dc);
SpecVector eval_tx_system(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op);
SpecVector eval_rx_system(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op);

// Dispatch on p.block.
SpecVector eval_block(const ParamVector& p, const DeviceConstants& dc, const OperatingPoint& op);

// Reported perfect-match floor for s11 so the spec space stays finite.
inline constexpr double kS11FloorDb = -200.0;

// Pieces of the block models that tests and the system models share.
namespace detail {

// Soft-clipped amplifier output (smoothness order 1):
//   P_out = G*P_in / sqrt(1 + (G*P_in/P_sat)^2)
double rapp_output_w(double gain_linear, double psat_w, double pin_w);

struct PaOperatingCurves {
    double gain_linear;   // small-signal power gain
    double pdc_w;
    double psat_w;
    double drain_eff_at(double pin_w) const;  // percent
    double pae_at(double pin_w) const;        // percent
};
PaOperatingCurves pa_curves(const ParamVector& p, const DeviceConstants& dc,
                            const OperatingPoint& op);

double vco_dc_power_w(const ParamVector& p, const DeviceConstants& dc);
double pa_dc_power_w(const ParamVector& p, const DeviceConstants& dc);

// VCO signal power at the tank, W (used by the tx chain as the PA drive).
double vco_signal_power_w(const ParamVector& p, const DeviceConstants& dc);

// Linear (not dB) noise factor of each receiver stage.
double lna_noise_factor(double w_n1_m, const DeviceConstants& dc, const OperatingPoint& op);
double gm_stage_noise_factor(double w_n1_m, const DeviceConstants& dc);

}  // namespace detail

}  // namespace rfsizer
