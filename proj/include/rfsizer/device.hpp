#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "rfsizer/units.hpp"

namespace rfsizer {

// First-order behavioral device/passive constants. Geometry-scaled device
// behavior: gm = k_gm*W, C_gs = k_cgs*W, I_bias = j_bias*W. Everything is SI.
struct DeviceConstants {
    double k_gm = 1.0e3;         // transconductance per width, S/m (1.0 mS/um)
    double k_cgs = 1.0e-9;       // gate capacitance per width, F/m (1.0 fF/um)
    double k_var_min = 0.6e-9;   // varactor min capacitance per width, F/m
    double k_var_max = 1.4e-9;   // varactor max capacitance per width, F/m
    double j_bias = 50.0;        // bias current density, A/m (0.05 mA/um)
    double gamma_noise = 1.3;    // channel noise factor
    double vdd = 1.2;            // supply, V
    double z0 = 50.0;            // reference impedance, ohm
    double q_ind = 15.0;         // inductor quality factor
    double q_xfmr = 10.0;        // transformer loaded Q
    double k_couple = 0.8;       // transformer coupling, (0, 1]
    double kT = 4.0035e-21;      // Boltzmann kT at 290 K, J
    double flicker_corner = 2.0 * kPi * 1.0e5;  // 1/f^3 corner, rad/s

    void validate() const;  // throws ConfigError
};

// Fixed excitation and measurement settings shared by all evaluations.
struct OperatingPoint {
    double f_rf = 28.0e9;   // Hz
    double f_lo = 27.9e9;   // Hz, must equal f_rf - f_if
    double f_if = 100.0e6;  // Hz
    double pn_offset = 1.0e6;  // phase-noise offset, Hz

    // PA input power sweep; efficiency metrics are maxima over this sweep.
    double pa_pin_start_dbm = -30.0;
    double pa_pin_stop_dbm = 10.0;
    double pa_pin_step_db = 1.0;

    double mixer_vin_amp = 0.05;  // mixer RF input amplitude, V
    double sens_bw = 100.0e6;     // sensitivity bandwidth, Hz
    double sens_snr_db = 10.0;    // required output SNR, dB

    // LNA termination reflection coefficients; 0 means matched terminations
    // and reduces the transducer gain to its closed form.
    std::complex<double> lna_gamma_s{0.0, 0.0};
    std::complex<double> lna_gamma_l{0.0, 0.0};

    void validate() const;  // throws ConfigError
};

struct SimConfig {
    DeviceConstants dc;
    OperatingPoint op;
};

// Flat key=value text config ('#' comments, blank lines allowed). Unknown
// keys are rejected. Returns defaults overlaid with the file's entries.
SimConfig load_sim_config(const std::string& path);
SimConfig parse_sim_config(std::istream& in);

// Applies one key=value pair; returns false when the key is not a
// DeviceConstants/OperatingPoint key (callers may layer their own keys).
bool apply_sim_key(SimConfig& cfg, const std::string& key, const std::string& value);

// Fingerprint of every constant that influences evaluation results.
std::uint64_t sim_config_hash(const DeviceConstants& dc, const OperatingPoint& op);

}  // namespace rfsizer
