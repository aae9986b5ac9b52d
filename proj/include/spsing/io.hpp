#pragma once

// Plain-text matrix files and certificate JSON.
//
// Matrix format: first line "rows cols", then one line of '0'/'1' characters
// per row. Blank lines and trailing whitespace are ignored.

#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spsing/bitmatrix.hpp"
#include "spsing/certify.hpp"
#include "spsing/errors.hpp"

namespace spsing {

inline void write_matrix(std::ostream& out, const BitMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (const auto& row : m.to_strings()) out << row << '\n';
}

inline std::string matrix_to_text(const BitMatrix& m) {
    std::ostringstream out;
    write_matrix(out, m);
    return out.str();
}

/// `source` (e.g. a file name) prefixes error messages.
inline BitMatrix read_matrix(std::istream& in, const std::string& source = "") {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) -> Error {
        return Error(ErrorKind::ParseError, (source.empty() ? "" : source + ": ") + "line " + std::to_string(line_no) + ": " + what);
    };

    if (!next_line()) throw fail("missing header \"rows cols\"");
    std::istringstream header(line);
    long long rows = -1, cols = -1;
    std::string extra;
    if (!(header >> rows >> cols) || (header >> extra) || rows < 0 || cols < 0) {
        throw fail("bad header \"" + line + "\", expected \"rows cols\"");
    }
    BitMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
    for (std::size_t i = 0; i < static_cast<std::size_t>(rows); ++i) {
        if (!next_line()) {
            ++line_no;
            throw fail("expected row " + std::to_string(i + 1) + " of " + std::to_string(rows) + ", found end of file");
        }
        if (line.size() != static_cast<std::size_t>(cols)) {
            throw fail("row has " + std::to_string(line.size()) + " entries, expected " + std::to_string(cols));
        }
        for (std::size_t j = 0; j < line.size(); ++j) {
            if (line[j] == '1') {
                m.set(i, j);
            } else if (line[j] != '0') {
                throw fail(std::string("unexpected character '") + line[j] + "'");
            }
        }
    }
    if (next_line()) throw fail("unexpected content after " + std::to_string(rows) + " rows");
    return m;
}

inline BitMatrix matrix_from_text(const std::string& text) {
    std::istringstream in(text);
    return read_matrix(in);
}

inline const char* to_string(Stage s) {
    switch (s) {
    case Stage::Gf2FullRank: return "gf2_full_rank";
    case Stage::ZeroOrDuplicateColumn: return "zero_or_duplicate_column";
    case Stage::RandomPrime: return "random_prime";
    case Stage::RationalKernel: return "rational_kernel";
    }
    return "unknown";
}

/// Big integers are written as decimal strings. Elapsed time is left out so
/// the document is reproducible.
inline nlohmann::json certificate_to_json(const SingularityCertificate& c) {
    nlohmann::json j;
    j["verdict"] = to_string(c.verdict);
    j["evidence"] = to_string(c.evidence);
    switch (c.evidence) {
    case Evidence::KernelVector: {
        auto w = nlohmann::json::array();
        for (const auto& x : c.witness) w.push_back(x.get_str());
        j["witness"] = w;
        break;
    }
    case Evidence::PrimeResidue:
        j["prime"] = c.prime;
        j["residue"] = c.residue;
        break;
    case Evidence::ExactDeterminant:
        j["determinant"] = c.determinant.get_str();
        break;
    }
    j["stats"] = {{"gf2_rank", c.stats.gf2_rank}, {"primes_tried", c.stats.primes_tried}, {"stage", to_string(c.stats.stage)}};
    return j;
}

inline SingularityCertificate certificate_from_json(const nlohmann::json& j) {
    try {
        SingularityCertificate c;
        const std::string verdict = j.at("verdict").get<std::string>();
        const std::string evidence = j.at("evidence").get<std::string>();
        if (verdict != "singular" && verdict != "nonsingular") throw Error(ErrorKind::ParseError, "unknown verdict " + verdict);
        c.verdict = verdict == "singular" ? Verdict::Singular : Verdict::Nonsingular;
        if (evidence == "kernel_vector") {
            c.evidence = Evidence::KernelVector;
            for (const auto& x : j.at("witness")) c.witness.emplace_back(x.get<std::string>());
        } else if (evidence == "prime_residue") {
            c.evidence = Evidence::PrimeResidue;
            c.prime = j.at("prime").get<std::uint64_t>();
            c.residue = j.at("residue").get<std::uint64_t>();
        } else if (evidence == "exact_determinant") {
            c.evidence = Evidence::ExactDeterminant;
            c.determinant = Integer(j.at("determinant").get<std::string>());
        } else {
            throw Error(ErrorKind::ParseError, "unknown evidence " + evidence);
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("certificate: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorKind::ParseError, std::string("certificate: ") + e.what());
    }
}

}  // namespace spsing
