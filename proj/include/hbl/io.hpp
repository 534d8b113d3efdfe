#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hbl/datum.hpp"
#include "hbl/presentation.hpp"

namespace hbl {

/// {"dim": m, "maps": [{"name": s, "rows": [[q...]...]}...], "exponents": [q...]}
/// Rationals are strings ("1/2") or JSON integers. Errors are ParseErrors tagged with the line
/// of the offending element where it can be located.
HblDatum parse_datum(std::string_view text);

/// {"vertices": [{"id": s, "basis": [[q...]...]}...], "edges": [{"from": id, "to": id, "theta": [q...]}...]}
/// The ambient dimension is taken from `ambient` when given, otherwise from the first basis row.
/// `width`, when given, is the required length of every theta list.
Presentation parse_presentation(std::string_view text, std::optional<std::size_t> ambient = std::nullopt,
                                std::optional<std::size_t> width = std::nullopt);

struct CandidateFile {
    std::vector<std::string> ids;
    std::vector<Subspace> subspaces;
};

/// {"candidates": [{"id": s, "basis": [[q...]...]}...]}
CandidateFile parse_candidates(std::string_view text, std::size_t ambient);

std::string serialize_datum(const HblDatum& datum);
/// Writes vertices and edges in the presentation's own order; canonicalize first for stable files.
std::string serialize_presentation(const Presentation& p);
std::string serialize_candidates(const CandidateFile& c);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace hbl
