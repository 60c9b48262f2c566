#include "stol/io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <type_traits>

#include "stol/error.hpp"

namespace stol::io {

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  require(j.is_object(), where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw Error(where + ": unknown key '" + key + "'");
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(where + ": missing key '" + key + "'");
  return *it;
}

std::size_t positive_count(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw Error(where + ": '" + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

Vector real_vector(const json& j, const std::string& where) {
  require(j.is_array(), where + ": expected an array of numbers");
  Vector out;
  out.reserve(j.size());
  for (const auto& v : j) {
    require(v.is_number(), where + ": expected a number");
    out.push_back(v.get<double>());
  }
  return out;
}

Labels label_vector(const json& j, const std::string& where) {
  require(j.is_array(), where + ": expected an array of integer labels");
  Labels out;
  out.reserve(j.size());
  for (const auto& v : j) {
    require(v.is_number_integer(), where + ": labels must be integers");
    out.push_back(v.get<Label>());
  }
  return out;
}

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols,
                        const std::string& where) {
  require(j.is_array() && j.size() == rows, where + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = real_vector(j[r], where);
    require(row.size() == cols, where + ": expected " + std::to_string(cols) + " columns");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    out.push_back(Vector(row.begin(), row.end()));
  }
  return out;
}

}  // namespace

std::string dataset_to_jsonl(const Dataset& ds) {
  std::string out = json{{"d", ds.d}, {"K", ds.K}, {"domain", to_string(ds.domain)}}.dump();
  out += '\n';
  for (const auto& s : ds.samples) {
    json line;
    line["x"] = s.x;
    line["y"] = s.y ? json(*s.y) : json(nullptr);
    out += line.dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_jsonl(std::istream& in, std::string_view name) {
  Dataset ds;
  std::string text;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line_no;
    const std::string where = std::string(name) + ":" + std::to_string(line_no);
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!have_header) {
      reject_unknown_keys(j, {"d", "K", "domain"}, where);
      ds.d = positive_count(j, "d", where);
      ds.K = positive_count(j, "K", where);
      const json& dom = field(j, "domain", where);
      require(dom.is_string(), where + ": 'domain' must be a string");
      ds.domain = domain_from_string(dom.get<std::string>());
      have_header = true;
      continue;
    }
    reject_unknown_keys(j, {"x", "y"}, where);
    const json& xs = field(j, "x", where);
    require(xs.is_array(), where + ": 'x' must be an array of vectors");
    Sample s;
    for (const auto& xt : xs) s.x.push_back(real_vector(xt, where));
    const json& ys = field(j, "y", where);
    if (!ys.is_null()) s.y = label_vector(ys, where);
    try {
      const ChainFeatureMap map(ds.d, ds.K);
      if (s.y)
        map.check(s.x, *s.y);
      else
        map.check_input(s.x);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    ds.samples.push_back(std::move(s));
  }
  require(have_header, std::string(name) + ": missing header line");
  return ds;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return dataset_from_jsonl(in, path.string());
}

json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

json model_to_json(const LinearScorer& model) {
  return json{{"kind", "linear"}, {"d", model.map.d()}, {"K", model.map.K()}, {"theta", model.theta}};
}

json model_to_json(const TransferScorer& model) {
  return json{{"kind", "transfer"},
              {"d", model.map().d()},
              {"K", model.map().K()},
              {"theta", model.source.theta},
              {"w", model.w}};
}

Model model_from_json(const json& j) {
  const std::string where = "model";
  require(j.is_object(), where + ": expected a JSON object");
  const json& kind = field(j, "kind", where);
  require(kind.is_string(), where + ": 'kind' must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "linear") {
    reject_unknown_keys(j, {"kind", "d", "K", "theta"}, where);
  } else if (k == "transfer") {
    reject_unknown_keys(j, {"kind", "d", "K", "theta", "w"}, where);
  } else {
    throw Error(where + ": unknown kind '" + k + "' (expected linear|transfer)");
  }
  const ChainFeatureMap map(positive_count(j, "d", where), positive_count(j, "K", where));
  LinearScorer source(map, real_vector(field(j, "theta", where), where + ".theta"));
  if (k == "linear") return source;
  return TransferScorer(std::move(source), real_vector(field(j, "w", where), where + ".w"));
}

Model load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(parse_json_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

const ChainFeatureMap& model_map(const Model& model) {
  return std::visit(
      [](const auto& m) -> const ChainFeatureMap& {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LinearScorer>)
          return m.map;
        else
          return m.map();
      },
      model);
}

Vector decoding_weights(const Model& model) {
  if (const auto* lin = std::get_if<LinearScorer>(&model)) return lin->theta;
  return std::get<TransferScorer>(model).combined_weights();
}

json report_to_json(const TrainReport& report, const TrainConfig& cfg) {
  return json{
      {"iterations", report.iterations},
      {"dual_objective_trace", report.dual_objective_trace},
      {"duality_gap_trace", report.duality_gap_trace},
      {"final_primal_objective", report.final_primal_objective},
      {"final_xi", report.final_xi},
      {"final_violation", report.final_violation},
      {"terminated_by", to_string(report.terminated_by)},
      {"working_set_size", report.working_set_size},
      {"config",
       {{"C", cfg.C}, {"eps_cp", cfg.eps_cp}, {"eps_qp", cfg.eps_qp},
        {"max_cp_iters", cfg.max_cp_iters}}},
      {"dual_linear_term", "mean_loss_minus_mean_source_score_difference"},
      {"initial_working_set", "empty"},
  };
}

json params_to_json(const DomainParams& p) {
  return json{{"d", p.d},
              {"K", p.K},
              {"label_prior", p.label_prior},
              {"transition", matrix_to_json(p.transition)},
              {"means", p.means},
              {"noise_sigma", p.noise_sigma},
              {"emission_transform",
               {{"R", matrix_to_json(p.emission_transform.R)}, {"b", p.emission_transform.b}}},
              {"length_range", {p.t_min, p.t_max}}};
}

DomainParams params_from_json(const json& j) {
  const std::string where = "domain params";
  reject_unknown_keys(j, {"d", "K", "label_prior", "transition", "means", "noise_sigma",
                          "emission_transform", "length_range"},
                      where);
  DomainParams p;
  p.d = positive_count(j, "d", where);
  p.K = positive_count(j, "K", where);
  p.label_prior = real_vector(field(j, "label_prior", where), where + ".label_prior");
  p.transition = matrix_from_json(field(j, "transition", where), p.K, p.K, where + ".transition");
  const json& means = field(j, "means", where);
  require(means.is_array(), where + ".means: expected an array");
  for (const auto& m : means) p.means.push_back(real_vector(m, where + ".means"));
  const json& sigma = field(j, "noise_sigma", where);
  require(sigma.is_number(), where + ".noise_sigma: expected a number");
  p.noise_sigma = sigma.get<double>();
  const json& et = field(j, "emission_transform", where);
  reject_unknown_keys(et, {"R", "b"}, where + ".emission_transform");
  p.emission_transform.R = matrix_from_json(field(et, "R", where), p.d, p.d, where + ".R");
  p.emission_transform.b = real_vector(field(et, "b", where), where + ".b");
  const json& range = field(j, "length_range", where);
  require(range.is_array() && range.size() == 2 && range[0].is_number_integer() &&
              range[1].is_number_integer() && range[0].get<long long>() >= 1 &&
              range[1].get<long long>() >= 1,
          where + ".length_range: expected [T_min, T_max] positive integers");
  p.t_min = range[0].get<std::size_t>();
  p.t_max = range[1].get<std::size_t>();
  p.validate();
  return p;
}

std::string predictions_to_jsonl(const std::vector<Labels>& predictions) {
  std::string out;
  for (const auto& y : predictions) {
    out += json(y).dump();
    out += '\n';
  }
  return out;
}

std::vector<Labels> predictions_from_jsonl(std::istream& in, std::string_view name) {
  std::vector<Labels> out;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(name) + ":" + std::to_string(line_no);
    try {
      out.push_back(label_vector(json::parse(text), where));
    } catch (const json::parse_error& e) {
      throw Error(where + ": malformed JSON (" + e.what() + ")");
    }
  }
  return out;
}

}  // namespace stol::io
