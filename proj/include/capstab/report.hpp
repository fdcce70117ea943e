#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "capstab/json_writer.hpp"
#include "capstab/stability.hpp"
#include "capstab/surface.hpp"
#include "capstab/verify.hpp"

namespace capstab {

/// Full analysis record for one surface: the form, its spectrum, the trace
/// bound, mass data, the verdict with witnesses, and the residual block.
/// Owns a copy of the surface so reports outlive their inputs.
struct StabilityReport {
    Surface surface;
    stability::StabilityForm form;
    stability::TraceBound tb;
    std::vector<double> phi_mass;
    EnclosedBody body;
    double area_M = 0.0;
    double area_Omega = 0.0;
    stability::Decision decision;
    verify::ResidualReport residuals;
};

inline StabilityReport analyze(const Surface& surf, double tol_centroid = 1e-6,
                               double tol_eig = -1.0, bool with_residuals = true,
                               int levels = 3) {
    StabilityReport rep{surf};
    rep.form = stability::q_form(surf);
    rep.tb = stability::trace_bound(surf);
    rep.phi_mass = stability::phi_mass_vector(surf);
    rep.body = surf.enclosed_body();
    rep.area_M = surf.area();
    rep.area_Omega = surf.wetted_region().area;
    rep.decision = stability::verdict(surf, rep.form, tol_centroid, tol_eig);
    if (with_residuals) rep.residuals = verify::run_residuals(surf, levels);
    return rep;
}

inline Json surface_json(const Surface& surf, const StabilityReport& rep) {
    Json j = Json::object();
    j.set("n", Json::integer(surf.dimension()));
    j.set("H", Json::number(surf.mean_curvature()));
    j.set("F", Json::number(surf.force_constant()));
    j.set("kind", Json::str(delaunay::to_string(surf.kind())));
    j.set("closed", Json::boolean(surf.closed()));
    j.set("theta", surf.closed() ? Json::null() : Json::number(surf.contact_angle()));
    j.set("area_M", Json::number(rep.area_M));
    j.set("area_Omega", Json::number(rep.area_Omega));
    j.set("volume_T", Json::number(rep.body.volume));
    j.set("centroid", Json::number_array(rep.body.centroid.begin(), rep.body.centroid.end()));
    j.set("normal_convention",
          Json::str("N = (sin(alpha), -cos(alpha) * omega); N points into T"));
    Json grid = Json::object();
    grid.set("step", Json::number(surf.step()));
    grid.set("samples", Json::integer(static_cast<long long>(surf.sample_count())));
    j.set("grid", std::move(grid));
    return j;
}

inline Json residuals_json(const verify::ResidualReport& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? Json::number(*v) : Json::null();
    };
    Json j = Json::object();
    j.set("robin", opt(r.robin));
    Json jac = Json::object();
    jac.set("residual", opt(r.jacobi_residual));
    jac.set("order", opt(r.jacobi_order));
    j.set("jacobi", std::move(jac));
    j.set("principal_direction", opt(r.principal_direction));
    j.set("flow_angle", opt(r.flow_angle));
    j.set("centroid_consistency", opt(r.centroid_consistency));
    j.set("free_boundary", opt(r.free_boundary));
    return j;
}

inline Json report_json(const StabilityReport& rep) {
    const Surface& surf = rep.surface;
    Json j = Json::object();
    j.set("surface", surface_json(surf, rep));

    Json qm = Json::array();
    for (int i = 0; i < rep.form.Q.dim; ++i) {
        Json row = Json::array();
        for (int k = 0; k < rep.form.Q.dim; ++k) row.push_back(Json::number(rep.form.Q(i, k)));
        qm.push_back(std::move(row));
    }
    j.set("Q", std::move(qm));
    j.set("eigenvalues",
          Json::number_array(rep.form.eigenvalues.begin(), rep.form.eigenvalues.end()));
    j.set("trace", Json::number(rep.tb.trace));
    j.set("trace_bound", Json::number(rep.tb.bound));
    j.set("lambda_min", Json::number(rep.form.lambda_min()));
    j.set("centroid",
          Json::number_array(rep.body.centroid.begin(), rep.body.centroid.end()));
    j.set("phi_mass", Json::number_array(rep.phi_mass.begin(), rep.phi_mass.end()));
    j.set("verdict", Json::str(stability::to_string(rep.decision.verdict)));

    Json w = Json::object();
    w.set("rule", Json::str(rep.decision.witness.rule));
    w.set("negative_eigenvalues", Json::integer(rep.decision.witness.negative_eigenvalues));
    w.set("centroid_norm", Json::number(rep.decision.centroid_norm));
    w.set("tol_centroid", Json::number(rep.decision.tol_centroid));
    w.set("tol_eig", Json::number(rep.decision.tol_eig));
    if (rep.decision.verdict == stability::Verdict::UnstableTheorem1 ||
        rep.decision.verdict == stability::Verdict::UnstableTwoEigenvalues) {
        w.set("xi", Json::number_array(rep.decision.witness.xi.begin(),
                                       rep.decision.witness.xi.end()));
        w.set("q_value", Json::number(rep.decision.witness.q_value));
        w.set("xi_mass", Json::number(rep.decision.witness.xi_mass));
    }
    if (rep.decision.verdict == stability::Verdict::UnstableTwoEigenvalues) {
        w.set("c1", Json::number(rep.decision.witness.c1));
        w.set("c2", Json::number(rep.decision.witness.c2));
    }
    j.set("verdict_witness", std::move(w));
    j.set("residuals", residuals_json(rep.residuals));
    return j;
}

/// One sweep CSV row: n,H,F,kind,theta,lambda_min,trace,centroid_norm,verdict.
/// H and F label the requested grid point (the realized force constant can
/// differ by the symmetric-start root tolerance).
inline std::string sweep_row(const Surface& surf, const StabilityReport& rep, double H,
                             double F) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%s\n",
                  surf.dimension(), H, F, delaunay::to_string(surf.kind()),
                  surf.closed() ? std::nan("") : surf.contact_angle(),
                  rep.form.lambda_min(), rep.tb.trace, rep.decision.centroid_norm,
                  stability::to_string(rep.decision.verdict));
    return buf;
}

}  // namespace capstab
