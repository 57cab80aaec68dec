#pragma once

// JSON records for sequences, operators and space descriptors, plus the
// compact text forms accepted on the command line.

#include <string>
#include <string_view>

#include <json.hpp>

#include "ergoseq/operator.hpp"
#include "ergoseq/sequence.hpp"
#include "ergoseq/spaces.hpp"

namespace ergoseq {

using Json = nlohmann::json;

/// {values: [...], tail_kind: "zero"|"constant"|"bounded", tail_value: x}
Json to_json(const TruncatedSequence& x);
TruncatedSequence sequence_from_json(const Json& j);

/// {form, dim, entries: [[r, c, v], ...] (1-based), cert: {row_norm, col_norm}}
/// for matrices; structural forms nest their parts.
Json to_json(const DsOperator& op);
/// Matrix records are re-certified with `tolerance`.
DsOperator operator_from_json(const Json& j, double tolerance = kNumericalTolerance);

/// {"kind": "lp"|"c0"|"linf", "p": x}
Json to_json(const SpaceDescriptor& space);
SpaceDescriptor space_from_json(const Json& j);

/// "v1,v2,...[@zero|@const:c|@bounded:b]"; an empty value list is allowed ("@const:1").
TruncatedSequence parse_sequence_spec(std::string_view spec);

/// identity:M | shift:left | shift:right | perm:i1,i2,... | file:PATH
DsOperator parse_operator_spec(std::string_view spec);

/// Reads an operator JSON record from disk.
DsOperator load_operator(const std::string& path, double tolerance);

}  // namespace ergoseq
