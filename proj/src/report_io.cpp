#include "spnf/report_io.hpp"

#include <cstdio>
#include <cstring>

namespace spnf {

namespace {

CaseTag tag_from_name(const std::string& s) {
    for (CaseTag t : {CaseTag::RealOffCircle, CaseTag::ComplexOffCircle, CaseTag::PlusOne,
                      CaseTag::MinusOne, CaseTag::UnitNonReal})
        if (s == case_tag_name(t)) return t;
    throw InvalidInput("unknown case tag '" + s + "'");
}

double number_from(const ordered_json& j, const char* what) {
    if (!j.is_number()) throw InvalidInput(std::string(what) + ": expected a number");
    return j.get<double>();
}

int int_from(const ordered_json& j, const char* what) {
    if (!j.is_number_integer()) throw InvalidInput(std::string(what) + ": expected an integer");
    return j.get<int>();
}

void fmt_double(double x, std::string& out) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
}

void emit(const ordered_json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const std::string pad1(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    switch (j.type()) {
        case nlohmann::detail::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad1;
                out += ordered_json(it.key()).dump();
                out += ": ";
                emit(it.value(), out, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case nlohmann::detail::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // arrays of plain numbers stay on one line
            bool flat = true;
            for (const auto& e : j)
                if (e.is_structured()) flat = false;
            if (flat) {
                out += "[";
                bool first = true;
                for (const auto& e : j) {
                    if (!first) out += ", ";
                    first = false;
                    emit(e, out, depth);
                }
                out += "]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad1;
                emit(e, out, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case nlohmann::detail::value_t::number_float:
            fmt_double(j.get<double>(), out);
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

ordered_json matrix_json(const Mat& M) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const ordered_json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw InvalidInput(std::string(what) + ": expected a non-empty array");
    if (j[0].is_array()) {
        const Eigen::Index r = static_cast<Eigen::Index>(j.size());
        const Eigen::Index c = static_cast<Eigen::Index>(j[0].size());
        Mat M(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            if (!j[static_cast<std::size_t>(i)].is_array() ||
                static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != c)
                throw InvalidInput(std::string(what) + ": ragged rows");
            for (Eigen::Index k = 0; k < c; ++k)
                M(i, k) = number_from(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                      what);
        }
        return M;
    }
    // flat row-major square
    const std::size_t total = j.size();
    const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(double(total))));
    if (side * side != static_cast<Eigen::Index>(total))
        throw InvalidInput(std::string(what) + ": flat matrix length is not a perfect square");
    Mat M(side, side);
    for (Eigen::Index i = 0; i < side; ++i)
        for (Eigen::Index k = 0; k < side; ++k)
            M(i, k) = number_from(j[static_cast<std::size_t>(i * side + k)], what);
    return M;
}

Mat read_matrix_doc(const ordered_json& doc) {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("matrix"))
        throw InvalidInput("input document must be {\"n\": k, \"matrix\": ...}");
    const int n = int_from(doc["n"], "n");
    if (n < 1) throw InvalidInput("n must be >= 1");
    Mat M = matrix_from_json(doc["matrix"], "matrix");
    if (M.rows() != 2 * n || M.cols() != 2 * n)
        throw InvalidInput("matrix must be 2n x 2n with n = " + std::to_string(n));
    if (!all_finite(M)) throw InvalidInput("matrix has non-finite entries");
    return M;
}

ordered_json matrix_doc(const Mat& M) {
    ordered_json doc;
    doc["n"] = static_cast<int>(M.rows() / 2);
    doc["matrix"] = matrix_json(M);
    return doc;
}

ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

cplx complex_from_json(const ordered_json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw InvalidInput(std::string(what) + ": expected [re, im]");
    return {number_from(j[0], what), number_from(j[1], what)};
}

ordered_json block_json(const NormalFormBlock& b) {
    ordered_json j;
    j["case"] = case_tag_name(b.case_tag);
    j["lambda"] = complex_json(b.lambda);
    j["size_param"] = b.size_param;
    j["sign"] = b.sign;
    j["dim"] = b.dim;
    return j;
}

NormalFormBlock block_from_json(const ordered_json& j) {
    if (!j.is_object()) throw InvalidInput("block: expected an object");
    for (const char* f : {"case", "lambda", "size_param", "sign", "dim"})
        if (!j.contains(f)) throw InvalidInput(std::string("block: missing field '") + f + "'");
    NormalFormBlock b;
    b.case_tag = tag_from_name(j["case"].get<std::string>());
    b.lambda = complex_from_json(j["lambda"], "block.lambda");
    b.size_param = int_from(j["size_param"], "block.size_param");
    b.sign = int_from(j["sign"], "block.sign");
    b.dim = int_from(j["dim"], "block.dim");
    return b;
}

ordered_json fingerprint_json(const Fingerprint& fp) {
    ordered_json classes = ordered_json::array();
    for (const auto& c : fp.classes) {
        ordered_json jc;
        jc["case"] = case_tag_name(c.case_tag);
        jc["lambda"] = complex_json(c.representative);
        jc["dims"] = c.dims;
        ordered_json qh = ordered_json::array();
        for (const auto& q : c.q_hat) {
            ordered_json jq;
            jq["m"] = q.m;
            jq["rank"] = q.rank;
            jq["signature"] =
                ordered_json::array({q.signature.n_plus, q.signature.n_minus, q.signature.n_zero});
            qh.push_back(std::move(jq));
        }
        jc["q_hat"] = std::move(qh);
        classes.push_back(std::move(jc));
    }
    ordered_json out;
    out["classes"] = std::move(classes);
    return out;
}

Fingerprint fingerprint_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("classes"))
        throw InvalidInput("fingerprint: missing 'classes'");
    Fingerprint fp;
    for (const auto& jc : j["classes"]) {
        FingerprintClass c;
        c.case_tag = tag_from_name(jc.at("case").get<std::string>());
        c.representative = complex_from_json(jc.at("lambda"), "fingerprint.lambda");
        for (const auto& d : jc.at("dims")) c.dims.push_back(int_from(d, "fingerprint.dims"));
        for (const auto& jq : jc.at("q_hat")) {
            QhatEntry q;
            q.m = int_from(jq.at("m"), "q_hat.m");
            q.rank = int_from(jq.at("rank"), "q_hat.rank");
            const auto& sig = jq.at("signature");
            if (!sig.is_array() || sig.size() != 3)
                throw InvalidInput("q_hat.signature: expected [n+, n-, n0]");
            q.signature = {int_from(sig[0], "signature"), int_from(sig[1], "signature"),
                           int_from(sig[2], "signature")};
            c.q_hat.push_back(q);
        }
        fp.classes.push_back(std::move(c));
    }
    return fp;
}

ordered_json analyze_report(const Mat& A, const NormalFormResult& r) {
    ordered_json doc;
    doc["command"] = "analyze";
    doc["n"] = static_cast<int>(A.rows() / 2);
    doc["matrix"] = matrix_json(A);
    ordered_json blocks = ordered_json::array();
    for (const auto& b : r.blocks) blocks.push_back(block_json(b));
    doc["blocks"] = std::move(blocks);
    doc["N"] = matrix_json(r.N);
    doc["P"] = matrix_json(r.P);
    ordered_json res;
    res["symplecticity_P"] = r.residual_report.symplecticity_P;
    res["reconstruction"] = r.residual_report.reconstruction;
    res["cond_P"] = r.residual_report.cond_P;
    doc["residuals"] = std::move(res);
    ordered_json snaps = ordered_json::array();
    for (const auto& e : r.residual_report.snaps.events) {
        ordered_json je;
        je["before"] = complex_json(e.before);
        je["after"] = complex_json(e.after);
        je["kind"] = e.kind;
        snaps.push_back(std::move(je));
    }
    doc["snap_report"] = std::move(snaps);
    doc["fingerprint"] = fingerprint_json(r.fingerprint);
    return doc;
}

ordered_json compare_report(const ConjugacyReport& r) {
    ordered_json doc;
    doc["command"] = "compare";
    doc["equal"] = r.equal;
    doc["reason"] = r.reason;
    return doc;
}

ordered_json generate_report(const Mat& A, const BlockSpec& spec, const Fingerprint& expected) {
    ordered_json doc;
    doc["command"] = "generate";
    doc["n"] = static_cast<int>(A.rows() / 2);
    doc["seed"] = spec.conjugator_seed;
    doc["matrix"] = matrix_json(A);
    doc["expected_fingerprint"] = fingerprint_json(expected);
    return doc;
}

BlockSpec blockspec_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("blocks"))
        throw InvalidInput("block spec: missing 'blocks'");
    BlockSpec spec;
    for (const auto& jb : j["blocks"]) spec.blocks.push_back(block_from_json(jb));
    if (j.contains("conjugator_seed"))
        spec.conjugator_seed = j["conjugator_seed"].get<std::uint64_t>();
    if (j.contains("conjugator_condition_cap"))
        spec.conjugator_condition_cap = number_from(j["conjugator_condition_cap"], "condition cap");
    return spec;
}

std::string dump_document(const ordered_json& j) {
    std::string out;
    emit(j, out, 0);
    out += "\n";
    return out;
}

}  // namespace spnf
