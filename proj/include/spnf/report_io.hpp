#pragma once
// JSON (de)serialization of matrices, block specs and report documents, plus a
// deterministic dumper with fixed 17-significant-digit number formatting.
#include <string>

#include "json.hpp"
#include "spnf/blocks.hpp"
#include "spnf/synth.hpp"

namespace spnf {

using ordered_json = nlohmann::ordered_json;

ordered_json matrix_json(const Mat& M);
Mat matrix_from_json(const ordered_json& j, const char* what);

// {"n": k, "matrix": row-major 2k x 2k} (nested rows also accepted)
Mat read_matrix_doc(const ordered_json& doc);
ordered_json matrix_doc(const Mat& M);

ordered_json complex_json(cplx z);  // [re, im]
cplx complex_from_json(const ordered_json& j, const char* what);

ordered_json block_json(const NormalFormBlock& b);
NormalFormBlock block_from_json(const ordered_json& j);

ordered_json fingerprint_json(const Fingerprint& fp);
Fingerprint fingerprint_from_json(const ordered_json& j);

ordered_json analyze_report(const Mat& A, const NormalFormResult& r);
ordered_json compare_report(const ConjugacyReport& r);
ordered_json generate_report(const Mat& A, const BlockSpec& spec, const Fingerprint& expected);

BlockSpec blockspec_from_json(const ordered_json& j);

// canonical serialization: 2-space indent, %.17g doubles, trailing newline
std::string dump_document(const ordered_json& j);

}  // namespace spnf
