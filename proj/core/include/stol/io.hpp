#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "stol/chain_model.hpp"
#include "stol/datagen.hpp"
#include "stol/trainer.hpp"

namespace stol::io {

using nlohmann::json;

// Dataset files are JSON Lines. Line 1 is the header
//   {"d": int, "K": int, "domain": "source"|"target"}
// and every following line is one sample
//   {"x": [[f64 x d] x T], "y": [int x T] | null}.
// Unknown keys are rejected. Parse errors name the 1-based line.
std::string dataset_to_jsonl(const Dataset& ds);
Dataset dataset_from_jsonl(std::istream& in, std::string_view name);
Dataset load_dataset(const std::filesystem::path& path);

// {"kind": "linear", "d", "K", "theta"} or
// {"kind": "transfer", "d", "K", "theta", "w"}.
using Model = std::variant<LinearScorer, TransferScorer>;

json model_to_json(const LinearScorer& model);
json model_to_json(const TransferScorer& model);
Model model_from_json(const json& j);
Model load_model(const std::filesystem::path& path);

const ChainFeatureMap& model_map(const Model& model);
// Weights to decode with: theta, or theta + w for a transfer model.
Vector decoding_weights(const Model& model);

json report_to_json(const TrainReport& report, const TrainConfig& cfg);

json params_to_json(const DomainParams& params);
DomainParams params_from_json(const json& j);

// One JSON array of labels per line.
std::string predictions_to_jsonl(const std::vector<Labels>& predictions);
std::vector<Labels> predictions_from_jsonl(std::istream& in, std::string_view name);

std::string read_file(const std::filesystem::path& path);
json parse_json_file(const std::filesystem::path& path);

}  // namespace stol::io
