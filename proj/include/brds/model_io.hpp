// model_io.hpp — model checkpoint JSON (single self-describing document).
//
// Schema:
//   { "dims": {"X": int, "H": int},
//     "storage": "float" | "fixed",
//     "fixed_spec": {"n": int, "f": int},          // fixed only
//     "weights": { "W_fx": [[..]], ... 8 names },  // row-major
//     "biases":  { "b_f": [..], ... 4 names } }
// Fixed models store raw integers. Key order is sorted, so equal models
// serialize to equal bytes.
#pragma once

#include <optional>
#include <string>

#include "brds/lstm.hpp"

namespace brds::lstm {

std::string model_to_json(const LstmParams& params);
std::string model_to_json(const FixedLstmParams& params);

struct LoadedModel {
    std::optional<LstmParams> as_float;
    std::optional<FixedLstmParams> as_fixed;

    bool is_fixed() const { return as_fixed.has_value(); }
};

LoadedModel model_from_json(const std::string& text);

void save_model(const LstmParams& params, const std::string& path);
void save_model(const FixedLstmParams& params, const std::string& path);
LoadedModel load_model(const std::string& path);

// Mask sidecar: {"masks": {"W_fx": [[0|1..]], ... 8 names}}
std::string masks_to_json(const std::array<Mask, 4>& masks_x,
                          const std::array<Mask, 4>& masks_h);
void masks_from_json(const std::string& text, std::array<Mask, 4>& masks_x,
                     std::array<Mask, 4>& masks_h);
void save_masks(const std::array<Mask, 4>& masks_x, const std::array<Mask, 4>& masks_h,
                const std::string& path);
void load_masks(const std::string& path, std::array<Mask, 4>& masks_x,
                std::array<Mask, 4>& masks_h);

} // namespace brds::lstm
