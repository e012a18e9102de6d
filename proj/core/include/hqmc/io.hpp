#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "hqmc/equivalence.hpp"
#include "hqmc/model_check.hpp"
#include "hqmc/models.hpp"

namespace hqmc {

using Json = nlohmann::json;

/// Any model document, discriminated by its "kind" field.
using AnyModel = std::variant<HqMC, QMC, SLHqMC, HQA, QA, BLM, Dfa>;

/// "hqmc", "qmc", "slhqmc", "hqa", "qa", "blm" or "dfa".
std::string kind_name(AnyModel const& model);

// Matrices are lists of rows; each entry is [re, im]. A bare number is read as
// a real entry.
Json matrix_to_json(Matrix const& m);
Matrix matrix_from_json(Json const& j);
Json vector_to_json(Vector const& v);
Vector vector_from_json(Json const& j);
/// {"kraus": [<matrix>, ...]}
Json operation_to_json(QuantumOperation const& op);
QuantumOperation operation_from_json(Json const& j);

/// Parses a model document. Models get the given validation tolerance.
/// Throws ParseError on malformed or unknown content; semantic invariants are
/// left to validate().
AnyModel model_from_json(Json const& j, double tol = default_tolerance());
Json model_to_json(AnyModel const& model);

/// Parses text; syntax errors report line and column.
Json parse_json_text(std::string_view text, std::string_view source = "<input>");
AnyModel load_model(std::filesystem::path const& path, double tol = default_tolerance());
void save_model(AnyModel const& model, std::filesystem::path const& path);

/// {"equivalent", "witness", "basis_size", "margin", ...}; witness symbols are
/// named with the given alphabet.
Json verdict_to_json(EquivalenceVerdict const& v, std::vector<std::string> const& alphabet);

char const* method_name(ReachMethod m) noexcept;

}  // namespace hqmc
