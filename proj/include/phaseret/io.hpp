#pragma once

// JSON and CSV file formats.
//
// JSON: {"field": "real"|"complex", "dim": n, "vectors": [[...], ...]} for
// frames, and {"field", "dim", "projections": [M_1, ...]} for projection
// families, each M_i given as n rows of n entries or as n^2 row-major entries.
// Complex entries are [re, im] pairs. Witness files carry "u" and "v".
//
// CSV (real only): one vector per line for frames; n-line blocks separated by
// blank lines for projections.

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "phaseret/certify.hpp"
#include "phaseret/frames.hpp"

namespace phaseret::io {

using nlohmann::json;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);
bool looks_like_csv(const std::string& path);

Frame parse_frame(const std::string& text, bool csv, const Tolerances& tol);
/// Accepts "projections", or "vectors" (read as the rank-one family of the frame).
ProjectionFamily parse_family(const std::string& text, bool csv, const Tolerances& tol);
std::pair<Mat, Mat> parse_witness(const std::string& text, Field field, Index dim);

json entry_to_json(Complex z, Field field);
json column_to_json(const Mat& column);
json frame_to_json(const Frame& f);
json family_to_json(const ProjectionFamily& p);
json witness_to_json(const PrWitness& w);
json partition_to_json(const PartitionWitness& w, std::size_t m);
json verdict_to_json(const Verdict& v, std::size_t m);

/// "{1, 3}" with 1-based indices.
std::string index_set(const std::vector<std::size_t>& zero_based);

}  // namespace phaseret::io
