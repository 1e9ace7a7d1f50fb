#include "edgevo/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "edgevo/errors.hpp"

namespace edgevo {

namespace {

double median_of(std::vector<double> values) {
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    m = 0.5 * (m + lower);
  }
  return m;
}

void fill_translation_stats(const std::vector<double>& errors, MetricReport& report) {
  report.count = static_cast<int>(errors.size());
  double sum = 0, sum_sq = 0, max_err = 0;
  for (double e : errors) {
    sum += e;
    sum_sq += e * e;
    max_err = std::max(max_err, e);
  }
  report.mean = sum / errors.size();
  report.rmse = std::sqrt(sum_sq / errors.size());
  report.max = max_err;
  report.median = median_of(errors);
}

}  // namespace

PosePairs associate_trajectories(const Trajectory& reference, const Trajectory& estimate,
                                 double max_dt) {
  if (reference.empty() || estimate.empty())
    throw Error(ErrorCode::EmptyInput, "association needs two non-empty trajectories");

  struct Candidate {
    double dt;
    int i, j;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < static_cast<int>(reference.size()); ++i) {
    const double t = reference[i].timestamp;
    auto lo = std::lower_bound(estimate.begin(), estimate.end(), t - max_dt,
                               [](const TimedPose& e, double v) { return e.timestamp < v; });
    for (auto it = lo; it != estimate.end() && it->timestamp <= t + max_dt; ++it)
      candidates.push_back({std::abs(it->timestamp - t), i,
                            static_cast<int>(std::distance(estimate.begin(), it))});
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.dt != b.dt) return a.dt < b.dt;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<char> ref_used(reference.size(), 0), est_used(estimate.size(), 0);
  PosePairs pairs;
  for (const Candidate& c : candidates) {
    if (ref_used[c.i] || est_used[c.j]) continue;
    ref_used[c.i] = est_used[c.j] = 1;
    pairs.emplace_back(reference[c.i], estimate[c.j]);
  }
  if (pairs.empty()) throw Error(ErrorCode::NoMatches, "no timestamp pairs within max_dt");
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first.timestamp < b.first.timestamp; });
  return pairs;
}

Pose umeyama_align(const std::vector<Vec3>& source, const std::vector<Vec3>& target) {
  if (source.size() != target.size())
    throw Error(ErrorCode::DimensionMismatch, "point sets differ in size");
  const int n = static_cast<int>(source.size());
  if (n < 3) throw Error(ErrorCode::DegenerateGeometry, "need at least 3 pairs");

  Vec3 src_mean = Vec3::Zero(), tgt_mean = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    src_mean += source[i];
    tgt_mean += target[i];
  }
  src_mean /= n;
  tgt_mean /= n;

  Mat3 cov = Mat3::Zero();
  for (int i = 0; i < n; ++i) cov += (target[i] - tgt_mean) * (source[i] - src_mean).transpose();
  cov /= n;

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 singular = svd.singularValues();
  // Collinear input leaves the rotation about the line unconstrained.
  if (singular(1) <= 1e-12 * std::max(singular(0), 1e-300))
    throw Error(ErrorCode::DegenerateGeometry, "points are collinear");

  Mat3 s = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) s(2, 2) = -1;

  Pose align;
  align.R = svd.matrixU() * s * svd.matrixV().transpose();
  align.t = tgt_mean - align.R * src_mean;
  return align;
}

AlignmentResult umeyama_align(const PosePairs& pairs) {
  std::vector<Vec3> source, target;
  source.reserve(pairs.size());
  target.reserve(pairs.size());
  for (const auto& [q, p] : pairs) {
    target.push_back(q.pose.t);
    source.push_back(p.pose.t);
  }
  AlignmentResult result;
  result.transform = umeyama_align(source, target);
  result.aligned_estimate.reserve(pairs.size());
  for (const auto& [q, p] : pairs)
    result.aligned_estimate.push_back({p.timestamp, result.transform * p.pose});
  return result;
}

namespace {

MetricReport rpe_impl(const PosePairs& pairs, const std::vector<int>& partner, double nominal_dt,
                      bool per_second, std::vector<MetricSample>* samples) {
  std::vector<double> trans_errors;
  std::vector<double> rot_errors;
  if (samples) samples->clear();

  for (size_t i = 0; i < pairs.size(); ++i) {
    const int j = partner[i];
    if (j < 0) continue;
    const auto& [qi, pi] = pairs[i];
    const auto& [qj, pj] = pairs[j];
    const double interval = per_second ? qj.timestamp - qi.timestamp : 1.0;
    if (!(interval > 0)) continue;

    const Pose error =
        (qi.pose.inverse() * qj.pose).inverse() * (pi.pose.inverse() * pj.pose);
    const double trans = error.t.norm() / interval;
    const double rot = rotation_angle(error.R) * 180.0 / M_PI / interval;
    trans_errors.push_back(trans);
    rot_errors.push_back(rot);
    if (samples) samples->push_back({qi.timestamp, trans, rot});
  }

  if (trans_errors.empty())
    throw Error(ErrorCode::InsufficientSpan, "no interval pairs for the requested delta");

  MetricReport report;
  fill_translation_stats(trans_errors, report);
  double rot_sq = 0;
  for (double e : rot_errors) rot_sq += e * e;
  report.rot_rmse = std::sqrt(rot_sq / rot_errors.size());
  report.dt = nominal_dt;
  return report;
}

}  // namespace

MetricReport rpe(const PosePairs& pairs, double delta_seconds,
                 std::vector<MetricSample>* samples) {
  if (!(delta_seconds > 0)) throw Error(ErrorCode::ConfigError, "rpe delta must be positive");

  // Partner = pair nearest to t_i + delta within 0.1 * delta.
  std::vector<int> partner(pairs.size(), -1);
  std::vector<double> times(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) times[i] = pairs[i].first.timestamp;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const double target = times[i] + delta_seconds;
    auto it = std::lower_bound(times.begin(), times.end(), target);
    int best = -1;
    double best_gap = 0.1 * delta_seconds;
    for (auto cand : {it, it == times.begin() ? it : std::prev(it)}) {
      if (cand == times.end()) continue;
      const double gap = std::abs(*cand - target);
      const auto idx = std::distance(times.begin(), cand);
      if (gap <= best_gap && static_cast<size_t>(idx) != i) {
        best = static_cast<int>(idx);
        best_gap = gap;
      }
    }
    partner[i] = best;
  }
  return rpe_impl(pairs, partner, delta_seconds, /*per_second=*/true, samples);
}

MetricReport rpe_frames(const PosePairs& pairs, int delta_frames,
                        std::vector<MetricSample>* samples) {
  if (delta_frames < 1) throw Error(ErrorCode::ConfigError, "rpe frame delta must be >= 1");
  std::vector<int> partner(pairs.size(), -1);
  for (size_t i = 0; i + delta_frames < pairs.size(); ++i)
    partner[i] = static_cast<int>(i) + delta_frames;
  return rpe_impl(pairs, partner, delta_frames, /*per_second=*/false, samples);
}

MetricReport ate(const PosePairs& pairs, std::vector<MetricSample>* samples,
                 AlignmentResult* alignment) {
  AlignmentResult local = umeyama_align(pairs);

  std::vector<double> errors;
  errors.reserve(pairs.size());
  if (samples) samples->clear();
  for (size_t i = 0; i < pairs.size(); ++i) {
    const Vec3 aligned = local.transform * pairs[i].second.pose.t;
    const double err = (aligned - pairs[i].first.pose.t).norm();
    errors.push_back(err);
    if (samples) samples->push_back({pairs[i].first.timestamp, err, 0});
  }

  MetricReport report;
  fill_translation_stats(errors, report);
  if (alignment) *alignment = std::move(local);
  return report;
}

}  // namespace edgevo
