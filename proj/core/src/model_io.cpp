#include "mfgirl/model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <vector>

namespace mfgirl {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("model: missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MfgModel parse_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(e.what(), line, col);
  }

  try {
    const int ns = require(j, "n_states").get<int>();
    const int na = require(j, "n_actions").get<int>();
    const double discount = require(j, "discount").get<double>();
    const auto mf = require(j, "mean_field").get<std::vector<double>>();
    if (ns <= 0 || na <= 0) throw ParseError("model: n_states and n_actions must be positive");
    if (static_cast<int>(mf.size()) != ns) throw ParseError("model: mean_field must have n_states entries");

    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(ns) * na, ns);
    std::vector<bool> seen(static_cast<std::size_t>(ns) * na, false);
    for (const auto& entry : require(j, "transition")) {
      const int x = require(entry, "x").get<int>();
      const int a = require(entry, "a").get<int>();
      const auto row = require(entry, "row").get<std::vector<double>>();
      if (x < 0 || x >= ns || a < 0 || a >= na) {
        throw ParseError("model: transition entry (x=" + std::to_string(x) + ",a=" + std::to_string(a) +
                         ") out of range");
      }
      if (static_cast<int>(row.size()) != ns) {
        throw ParseError("model: transition row (x=" + std::to_string(x) + ",a=" + std::to_string(a) +
                         ") must have n_states entries");
      }
      const std::size_t idx = static_cast<std::size_t>(x) * na + a;
      if (seen[idx]) {
        throw ParseError("model: duplicate transition row (x=" + std::to_string(x) + ",a=" + std::to_string(a) + ")");
      }
      seen[idx] = true;
      for (int y = 0; y < ns; ++y) p(static_cast<Eigen::Index>(idx), y) = row[y];
    }
    for (int x = 0; x < ns; ++x) {
      for (int a = 0; a < na; ++a) {
        if (!seen[static_cast<std::size_t>(x) * na + a]) {
          throw ParseError("model: missing transition row (x=" + std::to_string(x) + ",a=" + std::to_string(a) + ")");
        }
      }
    }

    MfgModel m(ns, na, std::move(p), discount, Eigen::Map<const Vector>(mf.data(), ns));
    if (j.contains("state_labels")) m.state_labels = j["state_labels"].get<std::vector<std::string>>();
    if (j.contains("action_labels")) m.action_labels = j["action_labels"].get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

MfgModel load_model(const std::filesystem::path& path) { return parse_model(read_text_file(path)); }

std::string dump_model(const MfgModel& m) {
  json j;
  j["n_states"] = m.n_states();
  j["n_actions"] = m.n_actions();
  j["discount"] = m.discount();
  j["mean_field"] = std::vector<double>(m.mean_field().data(), m.mean_field().data() + m.n_states());
  if (!m.state_labels.empty()) j["state_labels"] = m.state_labels;
  if (!m.action_labels.empty()) j["action_labels"] = m.action_labels;
  json rows = json::array();
  for (int x = 0; x < m.n_states(); ++x) {
    for (int a = 0; a < m.n_actions(); ++a) {
      std::vector<double> row(m.n_states());
      for (int y = 0; y < m.n_states(); ++y) row[y] = m.p(x, a, y);
      rows.push_back({{"x", x}, {"a", a}, {"row", row}});
    }
  }
  j["transition"] = std::move(rows);
  return j.dump(2);
}

}  // namespace mfgirl
