#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "l0infer/confset.hpp"
#include "l0infer/estimate.hpp"
#include "l0infer/hyptest.hpp"
#include "l0infer/mc.hpp"
#include "l0infer/synth.hpp"

#include <json.hpp>

namespace l0infer {

std::string test_kind_name(TestKind kind);
std::string solver_mode_name(SolverMode mode);
std::string construction_name(CsConstruction construction);

// CSV with header row y,x_1,..,x_p, one observation per line; doubles are
// printed with %.17g so rereading reproduces the bits.
void write_sample_csv(std::ostream& os, const LinearSample& sample);

// Binary layout (little endian): magic "L0SMPL01", then uint64 n, p, seed,
// then Y (n doubles), X column-major (n*p doubles), theta_true (p doubles).
void write_sample_binary(std::ostream& os, const LinearSample& sample);
LinearSample read_sample_binary(std::istream& is);

nlohmann::json fit_to_json(const PenalizedFit& fit);
nlohmann::json outcome_to_json(const TestOutcome& outcome);
nlohmann::json cs_to_json(const BallConfidenceSet& cs);
nlohmann::json report_to_json(const Report& report);

// Per-replication CSV: rep,seed,covered,diameter_sq,statistic,reject,branch,wall_ms.
void write_replication_csv(std::ostream& os, const std::vector<RepRow>& rows);

// Boundary CSV: rho,reject_rate_h0,reject_rate_h1,error_sum.
void write_boundary_csv(std::ostream& os, const std::vector<BoundaryRow>& rows);

std::string format_double(double value);

}  // namespace l0infer
