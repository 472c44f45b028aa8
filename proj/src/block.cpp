#include "rfsizer/block.hpp"

#include <array>

#include "rfsizer/errors.hpp"

namespace rfsizer {

namespace {

constexpr double kFemto = 1e-15;
constexpr double kPico = 1e-12;
constexpr double kMicro = 1e-6;

std::vector<FieldDef> prefixed(const std::string& prefix, const std::vector<FieldDef>& fields) {
    std::vector<FieldDef> out;
    out.reserve(fields.size());
    for (const auto& f : fields) out.push_back({prefix + "." + f.name, f.unit, f.si_scale});
    return out;
}

std::vector<FieldDef> concat(std::vector<FieldDef> a, const std::vector<FieldDef>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<BlockSchema> build_schemas() {
    std::vector<BlockSchema> s(7);

    s[0].id = BlockId::vco;
    s[0].name = "vco";
    s[0].params = {{"C", "fF", kFemto},    {"L", "pH", kPico},     {"R_p", "Ω", 1.0},
                   {"W_N1", "µm", kMicro}, {"W_N2", "µm", kMicro}, {"W_var", "µm", kMicro}};
    s[0].specs = {{"phase_noise", "dBc/Hz"}, {"tuning_range", "Hz"}};

    s[1].id = BlockId::pa;
    s[1].name = "pa";
    s[1].params = {{"L_ip", "pH", kPico},  {"L_is", "pH", kPico},  {"L_op", "pH", kPico},
                   {"L_os", "pH", kPico},  {"W_N1", "µm", kMicro}, {"W_N2", "µm", kMicro}};
    s[1].specs = {{"power_gain", "dB"}, {"drain_eff", "%"}, {"pae", "%"}};

    s[2].id = BlockId::lna;
    s[2].name = "lna";
    s[2].params = {{"C_1", "fF", kFemto},  {"C_2", "fF", kFemto},  {"L_d", "pH", kPico},
                   {"L_g", "pH", kPico},   {"L_s", "pH", kPico},   {"W_N1", "µm", kMicro},
                   {"W_N2", "µm", kMicro}};
    s[2].specs = {{"power_gain", "dB"}, {"s11", "dB"}, {"noise_figure", "dB"}};

    s[3].id = BlockId::mixer;
    s[3].name = "mixer";
    s[3].params = {{"C", "pF", kPico},
                   {"R", "Ω", 1.0},
                   {"W_N1", "µm", kMicro},
                   {"W_N2", "µm", kMicro}};
    s[3].specs = {{"voltage_swing", "V"}, {"conversion_gain", "dB"}};

    s[4].id = BlockId::cascode;
    s[4].name = "cascode";
    s[4].params = {{"R_D", "Ω", 1.0}, {"W_N1", "µm", kMicro}, {"W_N2", "µm", kMicro}};
    s[4].specs = {{"gain", "dB"}};

    s[5].id = BlockId::tx_system;
    s[5].name = "tx_system";
    s[5].params = concat(prefixed("vco", s[0].params), prefixed("pa", s[1].params));
    s[5].specs = {{"dc_power", "W"}, {"bandwidth", "Hz"}, {"output_power", "dBm"}, {"voltage_swing", "V"}};

    s[6].id = BlockId::rx_system;
    s[6].name = "rx_system";
    s[6].params = concat(concat(prefixed("lna", s[2].params), prefixed("mixer", s[3].params)),
                         prefixed("cascode", s[4].params));
    s[6].specs = {{"dc_power", "W"}, {"gain", "dB"}, {"noise_figure", "dB"}};

    return s;
}

const std::vector<BlockSchema>& schemas() {
    static const std::vector<BlockSchema> s = build_schemas();
    return s;
}

}  // namespace

int BlockSchema::param_index(const std::string& n) const {
    for (std::size_t i = 0; i < params.size(); ++i)
        if (params[i].name == n) return static_cast<int>(i);
    return -1;
}

int BlockSchema::spec_index(const std::string& n) const {
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].name == n) return static_cast<int>(i);
    return -1;
}

const BlockSchema& schema(BlockId id) { return schemas()[static_cast<int>(id)]; }

const std::string& block_name(BlockId id) { return schema(id).name; }

std::optional<BlockId> try_block_from_name(const std::string& name) {
    for (const auto& s : schemas())
        if (s.name == name) return s.id;
    return std::nullopt;
}

BlockId block_from_name(const std::string& name) {
    if (auto id = try_block_from_name(name)) return *id;
    throw SchemaError("unknown block '" + name +
                      "' (expected vco, pa, lna, mixer, cascode, tx_system or rx_system)");
}

}  // namespace rfsizer
