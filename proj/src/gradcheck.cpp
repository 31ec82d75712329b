#include "enatt/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace enatt {

namespace {

double eval_loss(const GraphBuilder& build) {
  Graph g(Dtype::F64);
  g.check_values = true;
  NodeRef loss = build(g);
  if (g.size(loss) != 1) throw std::invalid_argument("grad_check: loss must be scalar");
  return g.scalar(loss);
}

double rel_err(double a, double n) {
  const double denom = std::max({std::fabs(a), std::fabs(n), 1e-3});
  return std::fabs(a - n) / denom;
}

}  // namespace

GradCheckReport compare_against_fd(std::span<Param* const> params,
                                   const GraphBuilder& build,
                                   std::span<const Array> analytic,
                                   const GradCheckOptions& opts) {
  if (analytic.size() != params.size())
    throw std::invalid_argument("compare_against_fd: gradient count mismatch");
  GradCheckReport report;
  report.tolerance = opts.tolerance;
  for (size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    GradCheckEntry entry;
    entry.param = p.name;
    auto values = p.value.values();
    auto ga = analytic[k].values();
    for (size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + opts.h;
      const double lp = eval_loss(build);
      values[i] = saved - opts.h;
      const double lm = eval_loss(build);
      values[i] = saved;
      const double numeric = (lp - lm) / (2.0 * opts.h);
      const double a = ga[i];
      if (!std::isfinite(a) || !std::isfinite(numeric)) {
        entry.finite = false;
        entry.max_rel_err = std::numeric_limits<double>::infinity();
        entry.worst_index = static_cast<int>(i);
        entry.analytic = a;
        entry.numeric = numeric;
        break;
      }
      const double e = rel_err(a, numeric);
      if (e > entry.max_rel_err) {
        entry.max_rel_err = e;
        entry.worst_index = static_cast<int>(i);
        entry.analytic = a;
        entry.numeric = numeric;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    if (!entry.finite || entry.max_rel_err > opts.tolerance) report.pass = false;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

GradCheckReport grad_check(std::span<Param* const> params,
                           const GraphBuilder& build,
                           const GradCheckOptions& opts) {
  for (Param* p : params) p->zero_grad();
  Graph g(Dtype::F64);
  g.check_values = true;
  NodeRef loss = build(g);
  if (g.size(loss) != 1) throw std::invalid_argument("grad_check: loss must be scalar");
  g.backward(loss);
  std::vector<Array> grads;
  grads.reserve(params.size());
  for (Param* p : params) grads.push_back(p->grad);
  return compare_against_fd(params, build, grads, opts);
}

std::string GradCheckReport::to_string() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << "  " << e.param << ": max rel err " << e.max_rel_err;
    if (e.worst_index >= 0)
      os << " at [" << e.worst_index << "] (analytic " << e.analytic << ", numeric "
         << e.numeric << ")";
    if (!e.finite) os << " NON-FINITE";
    os << "\n";
  }
  os << (pass ? "PASS" : "FAIL") << " (max rel err " << max_rel_err << ", tolerance "
     << tolerance << ")";
  return os.str();
}

}  // namespace enatt
