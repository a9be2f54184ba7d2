#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ndsl/analysis.hpp"
#include "ndsl/classification.hpp"
#include "ndsl/problem_io.hpp"
#include "ndsl/spectrum.hpp"

namespace ndsl {

using Json = nlohmann::ordered_json;

// Doubles are serialized as shortest-round-trip strings so reports are
// byte-identical across runs of the same build.
inline Json json_num(double v) { return Json(format_double(v)); }

inline Json eigenpair_to_json(const Eigenpair& e) {
    Json j;
    j["re"] = json_num(e.lambda.real());
    j["im"] = json_num(e.lambda.imag());
    j["multiplicity"] = e.multiplicity;
    j["residual"] = json_num(e.residual);
    if (e.osc_count) j["osc_count"] = *e.osc_count;
    if (e.ghost) {
        j["ghost_class"] = to_string(e.ghost->tag);
        if (e.ghost->ground_state) j["ground_state"] = true;
        if (e.ghost->borderline) j["borderline"] = true;
        if (e.ghost->zero_eigenvalue) j["zero_eigenvalue"] = true;
    }
    if (e.ghost_form) {
        j["weighted_sq_re"] = json_num(e.ghost_form->weighted_sq.real());
        j["weighted_sq_im"] = json_num(e.ghost_form->weighted_sq.imag());
        j["weighted_abs"] = json_num(e.ghost_form->weighted_abs);
        j["dirichlet"] = json_num(e.ghost_form->dirichlet);
    }
    return j;
}

inline Json inventory_to_json(const SpectralInventory& inv) {
    Json j;
    j["real"] = Json::array();
    for (const auto& e : inv.real_pairs) j["real"].push_back(eigenpair_to_json(e));
    j["complex_upper"] = Json::array();
    for (const auto& e : inv.complex_pairs)
        j["complex_upper"].push_back(eigenpair_to_json(e));
    Json c;
    c["rect_count"] = inv.certificate.rect_count;
    c["found_count"] = inv.certificate.found_count;
    c["match"] = inv.certificate.match;
    c["max_conjugate_residual"] =
        json_num(inv.certificate.max_conjugate_residual);
    c["flagged_rects"] = inv.certificate.flagged.size();
    c["flagged_real"] = inv.certificate.flagged_real.size();
    j["certificate"] = c;
    return j;
}

/// Classification report: one CSV row per eigenpair.
inline void write_classification_csv(const SpectralInventory& inv,
                                     std::ostream& os) {
    os << "lambda_re,lambda_im,multiplicity,osc_count,weighted_sq_re,"
          "weighted_sq_im,weighted_abs,dirichlet,class,borderline_flag\n";
    auto row = [&](const Eigenpair& e) {
        os << format_double(e.lambda.real()) << ','
           << format_double(e.lambda.imag()) << ',' << e.multiplicity << ',';
        if (e.osc_count) os << *e.osc_count;
        os << ',';
        if (e.ghost_form)
            os << format_double(e.ghost_form->weighted_sq.real()) << ','
               << format_double(e.ghost_form->weighted_sq.imag()) << ','
               << format_double(e.ghost_form->weighted_abs) << ','
               << format_double(e.ghost_form->dirichlet) << ',';
        else
            os << ",,,,";
        os << (e.ghost ? to_string(e.ghost->tag) : "unclassified") << ','
           << (e.ghost && e.ghost->borderline ? 1 : 0) << '\n';
    };
    for (const auto& e : inv.real_pairs) row(e);
    for (const auto& e : inv.complex_pairs) row(e);
}

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::passed: return "passed";
        case CheckStatus::failed: return "failed";
        case CheckStatus::failed_as_stated: return "failed_as_stated";
        case CheckStatus::not_applicable: return "not_applicable";
    }
    return "?";
}

inline Json index_report_to_json(const IndexReport& rep) {
    Json j;
    j["n_R"] = rep.n_R;
    j["n_H"] = rep.n_H;
    j["Lambda_R"] = json_num(rep.Lambda_R);
    j["Lambda_H"] = json_num(rep.Lambda_H);
    j["m_pairs"] = rep.m_pairs;
    j["n_deg"] = rep.n_deg;
    j["stability_margin"] = rep.stability_margin;
    j["window_too_small"] = rep.window_too_small;
    j["checks"] = Json::array();
    for (const auto& c : rep.checks) {
        Json cj;
        cj["name"] = c.name;
        cj["lhs"] = json_num(c.lhs);
        cj["rhs"] = json_num(c.rhs);
        cj["status"] = to_string(c.status);
        if (!c.note.empty()) cj["note"] = c.note;
        j["checks"].push_back(cj);
    }
    return j;
}

inline void write_checks_csv(const std::vector<CheckRecord>& checks,
                             std::ostream& os) {
    os << "name,lhs,rhs,status,note\n";
    for (const auto& c : checks)
        os << c.name << ',' << format_double(c.lhs) << ','
           << format_double(c.rhs) << ',' << to_string(c.status) << ','
           << c.note << '\n';
}

inline void print_index_table(const IndexReport& rep, std::ostream& os) {
    os << "  n_R = " << rep.n_R << "    n_H = " << rep.n_H << '\n'
       << "  Lambda_H (= lambda_{n_R}) = " << format_double(rep.Lambda_H) << '\n'
       << "  Lambda_R (= lambda_{n_H}) = " << format_double(rep.Lambda_R) << '\n'
       << "  ghost pairs m = " << rep.m_pairs << ", degenerate real ghosts n = "
       << rep.n_deg << '\n'
       << "  stability margin = " << rep.stability_margin
       << (rep.window_too_small ? "  [window_too_small]" : "") << '\n';
    for (const auto& c : rep.checks)
        os << "    [" << to_string(c.status) << "] " << c.name
           << ": lhs=" << format_double(c.lhs) << " rhs=" << format_double(c.rhs)
           << (c.note.empty() ? "" : ("  (" + c.note + ")")) << '\n';
}

}  // namespace ndsl
