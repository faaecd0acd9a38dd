#include "brds/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace brds::lstm {
namespace {

using nlohmann::json;

constexpr const char* kWxNames[4] = {"W_fx", "W_ix", "W_gx", "W_ox"};
constexpr const char* kWhNames[4] = {"W_fh", "W_ih", "W_gh", "W_oh"};
constexpr const char* kBiasNames[4] = {"b_f", "b_i", "b_g", "b_o"};

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json fixed_mat_to_json(const FixedMat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename Setter>
void mat_from_json(const json& j, int rows, int cols, const char* name, Setter set) {
    data_check(j.is_array() && static_cast<int>(j.size()) == rows,
               std::string("model json: bad row count for ") + name);
    for (int r = 0; r < rows; ++r) {
        const json& row = j[r];
        data_check(row.is_array() && static_cast<int>(row.size()) == cols,
                   std::string("model json: bad column count for ") + name);
        for (int c = 0; c < cols; ++c) set(r, c, row[c]);
    }
}

json common_header(const LstmDims& dims) {
    json j;
    j["dims"] = {{"X", dims.input}, {"H", dims.hidden}};
    return j;
}

} // namespace

std::string model_to_json(const LstmParams& params) {
    params.check_dims();
    json j = common_header(params.dims);
    j["storage"] = "float";
    json weights, biases;
    for (int g = 0; g < 4; ++g) {
        weights[kWxNames[g]] = mat_to_json(params.w_x[g]);
        weights[kWhNames[g]] = mat_to_json(params.w_h[g]);
        biases[kBiasNames[g]] = params.b[g];
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    return j.dump(1);
}

std::string model_to_json(const FixedLstmParams& params) {
    json j = common_header(params.dims);
    j["storage"] = "fixed";
    j["fixed_spec"] = {{"n", params.spec.width_bits}, {"f", params.spec.frac_bits}};
    json weights, biases;
    for (int g = 0; g < 4; ++g) {
        weights[kWxNames[g]] = fixed_mat_to_json(params.w_x[g]);
        weights[kWhNames[g]] = fixed_mat_to_json(params.w_h[g]);
        biases[kBiasNames[g]] = params.b[g];
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    return j.dump(1);
}

LoadedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("model json: parse failed: ") + e.what());
    }
    data_check(j.contains("dims") && j.contains("storage") &&
               j.contains("weights") && j.contains("biases"),
               "model json: missing required field");
    LstmDims dims{j["dims"].value("X", 0), j["dims"].value("H", 0)};
    dims.validate();
    const std::string storage = j["storage"].get<std::string>();
    const json& weights = j["weights"];
    const json& biases = j["biases"];

    LoadedModel out;
    if (storage == "float") {
        LstmParams p = LstmParams::zeros(dims);
        for (int g = 0; g < 4; ++g) {
            mat_from_json(weights.at(kWxNames[g]), dims.hidden, dims.input, kWxNames[g],
                          [&](int r, int c, const json& v) { p.w_x[g].at(r, c) = v.get<double>(); });
            mat_from_json(weights.at(kWhNames[g]), dims.hidden, dims.hidden, kWhNames[g],
                          [&](int r, int c, const json& v) { p.w_h[g].at(r, c) = v.get<double>(); });
            const json& b = biases.at(kBiasNames[g]);
            data_check(static_cast<int>(b.size()) == dims.hidden, "model json: bad bias length");
            for (int r = 0; r < dims.hidden; ++r) p.b[g][r] = b[r].get<double>();
        }
        out.as_float = std::move(p);
    } else if (storage == "fixed") {
        data_check(j.contains("fixed_spec"), "model json: fixed model missing fixed_spec");
        numerics::FixedSpec spec{j["fixed_spec"].value("n", 0), j["fixed_spec"].value("f", -1)};
        spec.validate();
        FixedLstmParams p;
        p.dims = dims;
        p.spec = spec;
        for (int g = 0; g < 4; ++g) {
            p.w_x[g] = FixedMat(dims.hidden, dims.input);
            p.w_h[g] = FixedMat(dims.hidden, dims.hidden);
            p.b[g].assign(dims.hidden, 0);
            mat_from_json(weights.at(kWxNames[g]), dims.hidden, dims.input, kWxNames[g],
                          [&](int r, int c, const json& v) { p.w_x[g].at(r, c) = v.get<std::int32_t>(); });
            mat_from_json(weights.at(kWhNames[g]), dims.hidden, dims.hidden, kWhNames[g],
                          [&](int r, int c, const json& v) { p.w_h[g].at(r, c) = v.get<std::int32_t>(); });
            const json& b = biases.at(kBiasNames[g]);
            data_check(static_cast<int>(b.size()) == dims.hidden, "model json: bad bias length");
            for (int r = 0; r < dims.hidden; ++r) p.b[g][r] = b[r].get<std::int32_t>();
        }
        out.as_fixed = std::move(p);
    } else {
        throw DataError("model json: unknown storage kind '" + storage + "'");
    }
    return out;
}

namespace {

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    data_check(out.good(), "cannot open " + path);
    out << text;
    data_check(out.good(), "write failed for " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    data_check(in.good(), "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

void save_model(const LstmParams& params, const std::string& path) {
    write_text(model_to_json(params), path);
}

void save_model(const FixedLstmParams& params, const std::string& path) {
    write_text(model_to_json(params), path);
}

LoadedModel load_model(const std::string& path) {
    return model_from_json(read_text(path));
}

std::string masks_to_json(const std::array<Mask, 4>& masks_x,
                          const std::array<Mask, 4>& masks_h) {
    json m;
    const auto put = [&](const char* name, const Mask& mask) {
        json rows = json::array();
        for (int r = 0; r < mask.rows; ++r) {
            json row = json::array();
            for (int c = 0; c < mask.cols; ++c) row.push_back(static_cast<int>(mask.at(r, c)));
            rows.push_back(std::move(row));
        }
        m[name] = std::move(rows);
    };
    for (int g = 0; g < 4; ++g) {
        put(kWxNames[g], masks_x[g]);
        put(kWhNames[g], masks_h[g]);
    }
    json j;
    j["masks"] = std::move(m);
    return j.dump(1);
}

void masks_from_json(const std::string& text, std::array<Mask, 4>& masks_x,
                     std::array<Mask, 4>& masks_h) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("mask json: parse failed: ") + e.what());
    }
    data_check(j.contains("masks"), "mask json: missing 'masks'");
    const json& m = j["masks"];
    const auto get = [&](const char* name, Mask& mask) {
        const json& rows = m.at(name);
        const int nr = static_cast<int>(rows.size());
        data_check(nr > 0, std::string("mask json: empty matrix for ") + name);
        const int nc = static_cast<int>(rows[0].size());
        mask = Mask(nr, nc, 0);
        for (int r = 0; r < nr; ++r) {
            data_check(static_cast<int>(rows[r].size()) == nc, "mask json: ragged rows");
            for (int c = 0; c < nc; ++c)
                mask.at(r, c) = rows[r][c].get<int>() ? 1 : 0;
        }
    };
    for (int g = 0; g < 4; ++g) {
        get(kWxNames[g], masks_x[g]);
        get(kWhNames[g], masks_h[g]);
    }
}

void save_masks(const std::array<Mask, 4>& masks_x, const std::array<Mask, 4>& masks_h,
                const std::string& path) {
    write_text(masks_to_json(masks_x, masks_h), path);
}

void load_masks(const std::string& path, std::array<Mask, 4>& masks_x,
                std::array<Mask, 4>& masks_h) {
    masks_from_json(read_text(path), masks_x, masks_h);
}

} // namespace brds::lstm
