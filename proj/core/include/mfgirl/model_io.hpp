#pragma once

#include "mfgirl/model.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>

namespace mfgirl {

/// Parses a model document:
///
///   {
///     "n_states": 2, "n_actions": 2, "discount": 0.8,
///     "mean_field": [0.6, 0.4],
///     "state_labels": ["light", "heavy"],          (optional)
///     "action_labels": ["main", "alternative"],    (optional)
///     "transition": [ {"x": 0, "a": 0, "row": [0.9, 0.1]}, ... ]
///   }
///
/// Every (x, a) pair must appear exactly once in "transition". Comments
/// (// and /* */) are accepted. The result is not validated; call
/// validate_model() on it.
MfgModel parse_model(std::string_view text);
MfgModel load_model(const std::filesystem::path& path);

/// Inverse of parse_model (round-trips every probability exactly).
std::string dump_model(const MfgModel& model);

/// 1-based (line, column) of a byte offset into text.
std::pair<int, int> line_column(std::string_view text, std::size_t byte);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace mfgirl
