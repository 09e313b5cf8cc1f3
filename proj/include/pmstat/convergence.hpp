#pragma once

// Sequences over finite PM spaces and finite-horizon detectors for strong,
// A^I-statistical and A^I*-statistical convergence, Cauchyness, limit points,
// cluster points and statistical boundedness.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmstat/pmspace.hpp"
#include "pmstat/summability.hpp"

namespace pmstat {

struct SequenceAnnotation {
    std::optional<std::size_t> limit;        // intended A^I-statistical limit
    std::optional<PointSet> gamma;           // intended cluster point set
    std::optional<bool> cauchy;
    std::optional<IndexSet> null_set;        // index set the construction treats as null
    std::optional<IndexSet> agreement;       // splice agreement set
    std::vector<std::pair<std::size_t, IndexSet>> witnesses;  // nonthin witness per limit point
};

class IndexedSequence {
public:
    using Gen = std::function<std::size_t(std::size_t k)>;

    IndexedSequence(std::string description, Gen gen);

    std::size_t operator()(std::size_t k) const;  // k >= 1
    const std::string& description() const { return description_; }
    std::vector<std::size_t> materialize(std::size_t N) const;

    static IndexedSequence constant(std::size_t L);
    /// x_k = r on E and L elsewhere.
    static IndexedSequence eventually(std::size_t L, const IndexSet& E, std::size_t r);
    /// x_k = points[i] for the first part i containing k; the parts must
    /// cover N.
    static IndexedSequence alternator(std::vector<std::size_t> points, std::vector<IndexSet> parts);
    /// x_k = points[k - 1]; indices past the list raise std::out_of_range.
    static IndexedSequence from_list(std::vector<std::size_t> points);
    /// Deterministic pseudo-random points in [0, n) keyed by (seed, k).
    static IndexedSequence scrambled(std::size_t n, std::uint64_t seed);

    SequenceAnnotation annotation;

private:
    std::string description_;
    Gen gen_;
};

/// y_k = x_k for k in M, L otherwise.
IndexedSequence splice(const IndexedSequence& x, const IndexSet& M, std::size_t L);

/// A-partial densities of the visit sets {k : x_k = c}, one per label, with
/// densities of label sets obtained by summing the per-label series.
class VisitFrequencies {
public:
    VisitFrequencies(std::vector<std::size_t> values, std::size_t labels, SummMatrix A, Ideal I, double tol);

    std::size_t horizon() const { return values_.size(); }
    std::size_t labels() const { return labels_; }
    const std::vector<std::size_t>& values() const { return values_; }
    std::size_t value(std::size_t k) const { return values_[k - 1]; }
    const SummMatrix& matrix() const { return A_; }
    const Ideal& ideal() const { return I_; }
    double tol() const { return tol_; }

    /// First index k with x_k = c.
    std::optional<std::size_t> first_index(std::size_t c) const;

    const std::vector<double>& partial(std::size_t c) const;
    std::vector<double> partial(const PointSet& cs) const;

    /// delta_{A^I}({k : x_k in cs}).
    Verdict density(const PointSet& cs) const;
    /// delta_{A^I} of an arbitrary index set over 1..N.
    Verdict density(const Indicator& M) const;
    Verdict density(const IndexSet& M) const;

private:
    std::vector<std::size_t> values_;
    std::size_t labels_;
    SummMatrix A_;
    Ideal I_;
    double tol_;
    mutable std::vector<std::unique_ptr<std::vector<double>>> cache_;
};

VisitFrequencies visit_frequencies(const FinitePMSpace& S, const IndexedSequence& x, const SummMatrix& A,
                                   const Ideal& I, std::size_t N, double tol);

/// Points outside N_L(t), by the definition F(t) > 1 - t.
PointSet outside_neighborhood(const FinitePMSpace& S, std::size_t L, double t);

/// Exists k_0 <= N/2 with x_k in N_L(t) for every k in [k_0, N] (restricted
/// to k in K when given) and every t on the gap grid. The witness is the
/// smallest such k_0 for the hardest t.
Verdict strong_conv_detect(const FinitePMSpace& S, const std::vector<std::size_t>& values, std::size_t L,
                           const IndexSet* K = nullptr);

/// delta_{A^I}({k : x_k not in N_L(t)}) is null for every t on the gap grid.
/// value: largest defect-density estimate; liminf/limsup: of the hardest t.
Verdict ai_stat_conv_detect(const FinitePMSpace& S, const VisitFrequencies& vf, std::size_t L);

/// The defect sets by the d_L(F_{x_k L}, eps_0) >= t form agree with the
/// neighborhood form for every grid t.
bool defect_forms_agree(const FinitePMSpace& S, std::size_t L, double dl_tol = 1e-7);

/// Searches k_0 over first occurrences; the witness k_0 and its point are
/// reported when some center works, otherwise the best attempt.
Verdict ai_stat_cauchy_detect(const FinitePMSpace& S, const VisitFrequencies& vf);

enum class StarMode { convergence, cauchy };

/// delta_{A^I}(K^c) null and the subsequence along K strongly convergent to L
/// (or strongly Cauchy). Throws when the density of K^c is inconclusive.
Verdict ai_star_conv_detect(const FinitePMSpace& S, const VisitFrequencies& vf, std::size_t L, const IndexSet& K,
                            StarMode mode = StarMode::convergence);

/// A sequence of labels in a finite metric space (rho as a label x label table).
struct MetricSequence {
    std::vector<std::string> labels;
    std::vector<double> rho;  // row-major
    std::vector<std::size_t> values;

    double d(std::size_t a, std::size_t b) const { return rho[a * labels.size() + b]; }
};

/// Uses the metric of a metric-induced space.
MetricSequence metric_sequence(const FinitePMSpace& S, const std::vector<std::size_t>& values);
/// The sequence F_{x_k y_k} in (D+, d_L); labels are the distinct functions.
MetricSequence dl_sequence(const FinitePMSpace& S, const std::vector<std::size_t>& x,
                           const std::vector<std::size_t>& y, double dl_tol = 1e-7);

/// Thresholds at which the sets {k : rho(x_k, x_j) >= gamma} can change:
/// midpoints of consecutive distinct distances, after merging values within
/// zeta and treating values <= zeta as 0.
std::vector<double> gamma_grid(const MetricSequence& ms, double zeta = 1e-4);

struct CauchyForms {
    Verdict p1;  // Cauchy: some center j with every D_j(gamma) null
    Verdict p2;  // a null M with rho(x_m, x_n) < gamma off M
    Verdict p3;  // the set of j with non-null D_j(gamma) is null
    bool all() const { return p1.converged() && p2.converged() && p3.converged(); }
    bool none() const { return !p1.converged() && !p2.converged() && !p3.converged(); }
};

/// The three Cauchy formulations on a metric sequence. `annotated` is tried
/// first as the null set in p2, then the sets {k : rho(x_k, c) >= gamma/2}.
CauchyForms cauchy_forms(const MetricSequence& ms, const SummMatrix& A, const Ideal& I, double tol,
                         const std::optional<IndexSet>& annotated = std::nullopt, double zeta = 1e-4);

struct LambdaResult {
    PointSet members;
    std::vector<std::string> warnings;
};

/// Candidate c belongs when its witness set is nonthin and the subsequence
/// along it strongly converges to c. Candidates without a witness are skipped.
LambdaResult lambda_set(const FinitePMSpace& S, const VisitFrequencies& vf, const PointSet& candidates,
                        const std::vector<std::pair<std::size_t, IndexSet>>& witnesses);

struct GammaResult {
    PointSet members;
    PointSet inconclusive;  // points whose hit densities were inconclusive
};

/// Points nu with delta_{A^I}({k : x_k in N_nu(t)}) not null for every grid t.
GammaResult gamma_set(const FinitePMSpace& S, const VisitFrequencies& vf);

/// Points visited in the tail [N/2, N].
PointSet strong_limit_point_set(const std::vector<std::size_t>& values);

/// delta_{A^I}({k : x_k not in C}) null.
Verdict stat_bounded_check(const VisitFrequencies& vf, const PointSet& C);

}  // namespace pmstat
