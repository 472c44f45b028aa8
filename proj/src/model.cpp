#include "rfsizer/regress/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rfsizer/errors.hpp"
#include "rfsizer/regress/forest.hpp"
#include "rfsizer/regress/lookup.hpp"
#include "rfsizer/regress/mlp.hpp"
#include "rfsizer/regress/svr.hpp"
#include "rfsizer/regress/transformer.hpp"
#include "rfsizer/serialize.hpp"
#include "rfsizer/sweep.hpp"
#include "rfsizer/units.hpp"

namespace rfsizer {

namespace {
constexpr char kMagic[8] = {'R', 'F', 'S', 'Z', 'M', 'D', 'L', '1'};
}

const std::string& model_kind_name(ModelKind kind) {
    static const std::string names[] = {"rf", "svr", "mlp", "transformer", "lookup"};
    return names[static_cast<int>(kind)];
}

ModelKind model_kind_from_name(const std::string& name) {
    for (ModelKind k : {ModelKind::random_forest, ModelKind::svr, ModelKind::mlp,
                        ModelKind::transformer, ModelKind::lookup})
        if (model_kind_name(k) == name) return k;
    throw ConfigError("unknown model kind '" + name +
                      "' (expected rf, svr, mlp, transformer or lookup)");
}

std::vector<double> predict_rows(const Regressor& model, const TableView& inputs) {
    std::vector<double> out(inputs.rows * model.output_dim());
    for (std::size_t r = 0; r < inputs.rows; ++r)
        model.predict_one(inputs.row(r), {out.data() + r * model.output_dim(), model.output_dim()});
    return out;
}

double mse_of(const Regressor& model, const TableView& inputs, const TableView& targets) {
    const auto pred = predict_rows(model, inputs);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - targets.data[i];
        total += d * d;
    }
    return total / static_cast<double>(pred.size());
}

FittedModel FittedModel::assemble(BlockId block, std::uint64_t seed, double test_fraction,
                                  std::unique_ptr<Regressor> core,
                                  std::optional<Standardizer> spec_std,
                                  std::optional<Standardizer> param_std) {
    FittedModel m;
    m.block_ = block;
    m.seed_ = seed;
    m.test_fraction_ = test_fraction;
    m.core_ = std::move(core);
    m.spec_std_ = std::move(spec_std);
    m.param_std_ = std::move(param_std);
    m.bounds_ = sweep_bounds(block);
    return m;
}

PredictOutcome FittedModel::predict_full(const SpecVector& specs) const {
    if (specs.block != block_)
        throw SchemaError("model expects block " + block_name(block_) + ", got " +
                          block_name(specs.block));
    specs.validate();

    const auto& sc = schema(block_);
    std::vector<double> in = specs.values;
    if (spec_std_) in = spec_std_->transform(in);

    std::vector<double> raw(core_->output_dim());
    core_->predict_one(in, raw);
    if (param_std_) raw = param_std_->inverse(raw);

    PredictOutcome out;
    out.params.block = block_;
    out.params.values.resize(sc.params.size());
    out.clamped.assign(sc.params.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto [lo, hi] = bounds_[i];
        double v = raw[i];
        if (v < lo || v > hi || !std::isfinite(v)) {
            out.clamped[i] = true;
            v = std::isnan(v) ? lo : std::clamp(v, lo, hi);
        }
        out.params.values[i] = v;
    }
    return out;
}

ParamVector FittedModel::predict(const SpecVector& specs) const {
    return predict_full(specs).params;
}

void FittedModel::save(const std::string& path) const {
    std::ostringstream payload(std::ios::binary);
    io::write_pod<std::uint8_t>(payload, static_cast<std::uint8_t>(core_->kind()));
    io::write_pod<std::uint8_t>(payload, static_cast<std::uint8_t>(block_));
    io::write_pod<std::uint64_t>(payload, seed_);
    io::write_pod<double>(payload, test_fraction_);

    // Schema echo so a stale container cannot silently drive the wrong block.
    const auto& sc = schema(block_);
    io::write_pod<std::uint32_t>(payload, static_cast<std::uint32_t>(sc.params.size()));
    for (const auto& f : sc.params) {
        io::write_string(payload, f.name);
        io::write_string(payload, f.unit);
    }
    io::write_pod<std::uint32_t>(payload, static_cast<std::uint32_t>(sc.specs.size()));
    for (const auto& f : sc.specs) {
        io::write_string(payload, f.name);
        io::write_string(payload, f.unit);
    }

    io::write_pod<std::uint8_t>(payload, spec_std_ ? 1 : 0);
    if (spec_std_) {
        spec_std_->save(payload);
        param_std_->save(payload);
    }
    io::write_pod<std::uint64_t>(payload, bounds_.size());
    for (auto [lo, hi] : bounds_) {
        io::write_pod<double>(payload, lo);
        io::write_pod<double>(payload, hi);
    }
    core_->save_payload(payload);

    const std::string body = payload.str();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    io::write_pod<std::uint32_t>(out, crc32(body.data(), body.size()));
    if (!out) throw IoError("write failed: " + path);
}

FittedModel FittedModel::load(const std::string& path, std::optional<ModelKind> expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream buf(std::ios::binary);
    buf << in.rdbuf();
    const std::string file = buf.str();

    if (file.size() < sizeof(kMagic) + sizeof(std::uint32_t) ||
        !std::equal(kMagic, kMagic + sizeof(kMagic), file.begin()))
        throw CorruptionError("not a model container: " + path);

    const std::size_t body_len = file.size() - sizeof(kMagic) - sizeof(std::uint32_t);
    const char* body = file.data() + sizeof(kMagic);
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, file.data() + sizeof(kMagic) + body_len, sizeof(stored_crc));
    if (crc32(body, body_len) != stored_crc)
        throw CorruptionError("checksum mismatch (truncated or corrupted): " + path);

    std::istringstream payload(std::string(body, body_len), std::ios::binary);
    FittedModel m;
    const auto kind = static_cast<ModelKind>(io::read_pod<std::uint8_t>(payload));
    if (expected && kind != *expected)
        throw CorruptionError("model kind mismatch: file holds '" + model_kind_name(kind) +
                              "', expected '" + model_kind_name(*expected) + "'");
    const auto block_raw = io::read_pod<std::uint8_t>(payload);
    if (block_raw > static_cast<std::uint8_t>(BlockId::rx_system))
        throw CorruptionError("bad block id in container");
    m.block_ = static_cast<BlockId>(block_raw);
    m.seed_ = io::read_pod<std::uint64_t>(payload);
    m.test_fraction_ = io::read_pod<double>(payload);

    const auto& sc = schema(m.block_);
    auto check_fields = [&payload](const std::vector<FieldDef>& fields, const char* what) {
        auto n = io::read_pod<std::uint32_t>(payload);
        if (n != fields.size()) throw CorruptionError(std::string("schema echo mismatch: ") + what);
        for (const auto& f : fields) {
            if (io::read_string(payload) != f.name || io::read_string(payload) != f.unit)
                throw CorruptionError(std::string("schema echo mismatch: ") + what);
        }
    };
    check_fields(sc.params, "params");
    check_fields(sc.specs, "specs");

    if (io::read_pod<std::uint8_t>(payload)) {
        m.spec_std_ = Standardizer::load(payload);
        m.param_std_ = Standardizer::load(payload);
    }
    auto n_bounds = io::read_pod<std::uint64_t>(payload);
    if (n_bounds != sc.params.size()) throw CorruptionError("bounds size mismatch");
    for (std::uint64_t i = 0; i < n_bounds; ++i) {
        const double lo = io::read_pod<double>(payload);
        const double hi = io::read_pod<double>(payload);
        m.bounds_.emplace_back(lo, hi);
    }

    switch (kind) {
        case ModelKind::random_forest: m.core_ = RandomForest::load_payload(payload); break;
        case ModelKind::svr: m.core_ = SvrModel::load_payload(payload); break;
        case ModelKind::mlp: m.core_ = Mlp::load_payload(payload); break;
        case ModelKind::transformer: m.core_ = TransformerNet::load_payload(payload); break;
        case ModelKind::lookup: m.core_ = LookupModel::load_payload(payload); break;
        default: throw CorruptionError("bad model kind in container");
    }
    return m;
}

}  // namespace rfsizer
