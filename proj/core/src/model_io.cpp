#include "srrc/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "srrc/errors.hpp"

namespace srrc {

namespace {

using nlohmann::json;

void write_groups(std::ostringstream& os, const CompressionMatrix& r) {
    os << '[';
    for (std::size_t i = 0; i < r.groups.size(); ++i) {
        if (i) os << ',';
        os << '[';
        for (std::size_t k = 0; k < r.groups[i].size(); ++k) {
            if (k) os << ',';
            os << r.groups[i][k];
        }
        os << ']';
    }
    os << ']';
}

template <typename T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("model file is missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model field '") + key + "' has the wrong type: " + e.what());
    }
}

}  // namespace

std::string format_real(double value) {
    if (!std::isfinite(value)) throw InvalidArgument("cannot serialize a non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string model_to_json(const RRCModel& model) {
    model.validate();
    const auto& d = model.diagnostics;
    std::ostringstream os;
    os << "{\n";
    os << "  \"format\": \"" << kModelFormat << "\",\n";
    os << "  \"schema_version\": " << kModelSchemaVersion << ",\n";
    os << "  \"n\": " << model.n << ",\n";
    os << "  \"L\": " << model.lag << ",\n";
    os << "  \"p\": " << model.order << ",\n";
    os << "  \"n_out\": " << model.n_out << ",\n";
    os << "  \"target_lag\": " << model.target_lag << ",\n";
    os << "  \"selector_offset\": " << model.selector_offset << ",\n";
    os << "  \"compression\": {\"rho\": " << model.R.rows() << ", \"d\": " << model.R.cols
       << ", \"groups\": ";
    write_groups(os, model.R);
    os << "},\n";
    os << "  \"W_hat\": {\"rows\": " << model.W_hat.rows() << ", \"cols\": " << model.W_hat.cols()
       << ", \"triplets\": [";
    bool first = true;
    for (Index i = 0; i < model.W_hat.rows(); ++i) {
        for (Index j = 0; j < model.W_hat.cols(); ++j) {
            const double v = model.W_hat(i, j);
            if (v == 0.0) continue;
            os << (first ? "\n    " : ",\n    ") << '[' << i << ", " << j << ", " << format_real(v) << ']';
            first = false;
        }
    }
    os << (first ? "]},\n" : "\n  ]},\n");
    os << "  \"diagnostics\": {\n";
    os << "    \"residual_norm\": " << format_real(d.residual_norm) << ",\n";
    os << "    \"target_norm\": " << format_real(d.target_norm) << ",\n";
    os << "    \"nnz\": " << d.nnz << ",\n";
    os << "    \"rank\": " << d.rank << ",\n";
    os << "    \"samples\": " << d.samples << ",\n";
    os << "    \"residual_bounds\": [";
    for (Index i = 0; i < d.residual_bounds.size(); ++i) {
        os << (i ? ", " : "") << format_real(d.residual_bounds[i]);
    }
    os << "],\n";
    os << "    \"data_range\": " << format_real(d.data_range) << ",\n";
    os << "    \"data_scale\": " << format_real(d.data_scale) << ",\n";
    os << "    \"converged\": " << (d.converged ? "true" : "false") << ",\n";
    os << "    \"seed\": " << d.seed << ",\n";
    os << "    \"rng\": " << json(d.rng).dump() << "\n";
    os << "  }\n";
    os << "}\n";
    return os.str();
}

RRCModel model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("format") || !doc["format"].is_string() ||
        doc["format"].get<std::string>() != kModelFormat) {
        throw SchemaError("not an srrc model file (bad format marker)");
    }
    const int version = field<int>(doc, "schema_version");
    if (version != kModelSchemaVersion) {
        throw UnsupportedVersion("unsupported model schema version " + std::to_string(version) +
                                 " (expected " + std::to_string(kModelSchemaVersion) + ")");
    }

    RRCModel m;
    m.n = field<int>(doc, "n");
    m.lag = field<int>(doc, "L");
    m.order = field<int>(doc, "p");
    m.n_out = field<int>(doc, "n_out");
    m.target_lag = field<int>(doc, "target_lag");
    m.selector_offset = field<int>(doc, "selector_offset");

    const json comp = field<json>(doc, "compression");
    m.R.n = m.n;
    m.R.lag = m.lag;
    m.R.order = m.order;
    m.R.cols = field<Index>(comp, "d");
    m.R.groups = field<std::vector<std::vector<Index>>>(comp, "groups");
    if (field<Index>(comp, "rho") != m.R.rows()) throw SchemaError("compression rho does not match groups");

    const json w = field<json>(doc, "W_hat");
    const Index rows = field<Index>(w, "rows");
    const Index cols = field<Index>(w, "cols");
    if (rows < 0 || cols < 0) throw SchemaError("negative W_hat dimensions");
    m.W_hat = Matrix::Zero(rows, cols);
    for (const auto& t : field<json>(w, "triplets")) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
            !t[2].is_number()) {
            throw SchemaError("W_hat triplet must be [i, j, value]");
        }
        const auto i = t[0].get<Index>();
        const auto j = t[1].get<Index>();
        if (i < 0 || i >= rows || j < 0 || j >= cols) throw SchemaError("W_hat triplet index out of range");
        m.W_hat(i, j) = t[2].get<double>();
    }

    const json d = field<json>(doc, "diagnostics");
    auto& diag = m.diagnostics;
    diag.residual_norm = field<double>(d, "residual_norm");
    diag.target_norm = field<double>(d, "target_norm");
    diag.nnz = field<Index>(d, "nnz");
    diag.rank = field<Index>(d, "rank");
    diag.samples = field<Index>(d, "samples");
    const auto bounds = field<std::vector<double>>(d, "residual_bounds");
    diag.residual_bounds = Eigen::Map<const Vector>(bounds.data(), static_cast<Index>(bounds.size()));
    diag.data_range = field<double>(d, "data_range");
    diag.data_scale = field<double>(d, "data_scale");
    diag.converged = field<bool>(d, "converged");
    diag.seed = field<std::uint64_t>(d, "seed");
    diag.rng = field<std::string>(d, "rng");

    m.validate();
    return m;
}

void save_model(const RRCModel& model, const std::filesystem::path& path) {
    const std::string text = model_to_json(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

RRCModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace srrc
