#include "semitcl/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

namespace semitcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// frame -> box, one per track.
using FrameBoxes = std::map<int, Box>;

std::vector<FrameBoxes> index_by_frame(const std::vector<Track>& tracks) {
  std::vector<FrameBoxes> out(tracks.size());
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    for (const auto& inst : tracks[t].instances) out[t][inst.frame] = inst.box;
  }
  return out;
}

long total_boxes(const std::vector<Track>& tracks) {
  long n = 0;
  for (const auto& t : tracks) n += static_cast<long>(t.instances.size());
  return n;
}

}  // namespace

MetricsReport clear_mot(const std::vector<Track>& gt, const std::vector<Track>& pred,
                        double iou_threshold) {
  MetricsReport rep;
  rep.gt_boxes = total_boxes(gt);
  rep.pred_boxes = total_boxes(pred);
  rep.gt_tracks = static_cast<long>(gt.size());

  const auto gt_frames = index_by_frame(gt);
  const auto pred_frames = index_by_frame(pred);

  std::set<int> frames;
  for (const auto& m : gt_frames)
    for (const auto& [f, box] : m) frames.insert(f);
  for (const auto& m : pred_frames)
    for (const auto& [f, box] : m) frames.insert(f);

  std::map<std::size_t, std::size_t> prev_match;  // gt index -> pred index, last frame
  std::map<std::size_t, std::size_t> last_match;  // gt index -> pred index, any past frame
  std::vector<std::vector<char>> covered(gt.size());
  std::vector<std::vector<int>> gt_frame_list(gt.size());
  for (std::size_t g = 0; g < gt.size(); ++g) {
    gt_frame_list[g].reserve(gt_frames[g].size());
    for (const auto& [f, box] : gt_frames[g]) gt_frame_list[g].push_back(f);
    covered[g].assign(gt_frame_list[g].size(), 0);
  }
  std::vector<std::size_t> gt_frame_cursor(gt.size(), 0);

  for (int f : frames) {
    std::vector<std::size_t> gts;
    std::vector<std::size_t> preds;
    for (std::size_t g = 0; g < gt.size(); ++g)
      if (gt_frames[g].count(f)) gts.push_back(g);
    for (std::size_t p = 0; p < pred.size(); ++p)
      if (pred_frames[p].count(f)) preds.push_back(p);

    std::map<std::size_t, std::size_t> matches;
    std::set<std::size_t> used_preds;

    // Persist the previous frame's correspondences while they still overlap.
    for (std::size_t g : gts) {
      auto it = prev_match.find(g);
      if (it == prev_match.end()) continue;
      const std::size_t p = it->second;
      if (!pred_frames[p].count(f) || used_preds.count(p)) continue;
      if (iou(gt_frames[g].at(f), pred_frames[p].at(f)) >= iou_threshold) {
        matches[g] = p;
        used_preds.insert(p);
      }
    }

    // Hungarian over the leftovers.
    std::vector<std::size_t> free_gts;
    std::vector<std::size_t> free_preds;
    for (std::size_t g : gts)
      if (!matches.count(g)) free_gts.push_back(g);
    for (std::size_t p : preds)
      if (!used_preds.count(p)) free_preds.push_back(p);
    if (!free_gts.empty() && !free_preds.empty()) {
      Eigen::MatrixXd cost(free_gts.size(), free_preds.size());
      for (std::size_t r = 0; r < free_gts.size(); ++r) {
        const Box& gbox = gt_frames[free_gts[r]].at(f);
        for (std::size_t c = 0; c < free_preds.size(); ++c) {
          const double overlap = iou(gbox, pred_frames[free_preds[c]].at(f));
          cost(r, c) = overlap < iou_threshold ? kInf : 1.0 - overlap;
        }
      }
      for (const auto& [r, c] : hungarian(cost).pairs) {
        matches[free_gts[r]] = free_preds[c];
        used_preds.insert(free_preds[c]);
      }
    }

    for (const auto& [g, p] : matches) {
      auto it = last_match.find(g);
      if (it != last_match.end() && it->second != p) rep.ids += 1;
      last_match[g] = p;
    }

    rep.fn += static_cast<long>(gts.size() - matches.size());
    rep.fp += static_cast<long>(preds.size() - matches.size());

    for (std::size_t g : gts) {
      // gt frames iterate in the same ascending order as `frames`.
      covered[g][gt_frame_cursor[g]] = matches.count(g) ? 1 : 0;
      gt_frame_cursor[g] += 1;
    }
    prev_match = std::move(matches);
  }

  for (std::size_t g = 0; g < gt.size(); ++g) {
    const auto& cov = covered[g];
    long hit = 0;
    for (char c : cov) hit += c;
    const double ratio = cov.empty() ? 0.0 : static_cast<double>(hit) / cov.size();
    if (ratio >= 0.8) rep.mt += 1;
    if (ratio <= 0.2) rep.ml += 1;
    // Interruptions: covered -> uncovered transitions that resume later.
    long last_covered = -1;
    for (long i = static_cast<long>(cov.size()) - 1; i >= 0; --i) {
      if (cov[i]) {
        last_covered = i;
        break;
      }
    }
    for (long i = 0; i + 1 <= last_covered; ++i) {
      if (cov[i] && !cov[i + 1]) rep.frag += 1;
    }
  }

  rep.mota = rep.gt_boxes > 0
                 ? 1.0 - static_cast<double>(rep.fn + rep.fp + rep.ids) / rep.gt_boxes
                 : 0.0;
  return rep;
}

MetricsReport idf1(const std::vector<Track>& gt, const std::vector<Track>& pred,
                   double iou_threshold) {
  MetricsReport rep;
  rep.gt_boxes = total_boxes(gt);
  rep.pred_boxes = total_boxes(pred);
  rep.gt_tracks = static_cast<long>(gt.size());

  const auto gt_frames = index_by_frame(gt);
  const auto pred_frames = index_by_frame(pred);
  const int ng = static_cast<int>(gt.size());
  const int np = static_cast<int>(pred.size());

  // Binary per-frame overlaps between each (gt id, pred id) pair.
  Eigen::MatrixXd overlap_count = Eigen::MatrixXd::Zero(std::max(ng, 1), std::max(np, 1));
  for (int g = 0; g < ng; ++g) {
    for (int p = 0; p < np; ++p) {
      long m = 0;
      for (const auto& [f, gbox] : gt_frames[g]) {
        auto it = pred_frames[p].find(f);
        if (it != pred_frames[p].end() && iou(gbox, it->second) >= iou_threshold) ++m;
      }
      overlap_count(g, p) = static_cast<double>(m);
    }
  }

  long idtp = 0;
  if (ng > 0 || np > 0) {
    const int n = ng + np;
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, n, kInf);
    for (int g = 0; g < ng; ++g) {
      const double len_g = static_cast<double>(gt_frames[g].size());
      for (int p = 0; p < np; ++p) {
        const double len_p = static_cast<double>(pred_frames[p].size());
        cost(g, p) = len_g + len_p - 2.0 * overlap_count(g, p);
      }
      cost(g, np + g) = len_g;  // gt left unmatched
    }
    for (int p = 0; p < np; ++p) {
      cost(ng + p, p) = static_cast<double>(pred_frames[p].size());  // pred unmatched
    }
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < ng; ++j) cost(ng + i, np + j) = 0.0;

    for (const auto& [r, c] : hungarian(cost).pairs) {
      if (r < ng && c < np) idtp += static_cast<long>(overlap_count(r, c));
    }
  }

  rep.idtp = idtp;
  rep.idfn = rep.gt_boxes - idtp;
  rep.idfp = rep.pred_boxes - idtp;
  const long denom = 2 * rep.idtp + rep.idfp + rep.idfn;
  rep.idf1 = denom > 0 ? 2.0 * rep.idtp / denom : 0.0;
  return rep;
}

MetricsReport evaluate(const std::vector<Track>& gt, const std::vector<Track>& pred,
                       double iou_threshold) {
  MetricsReport clear = clear_mot(gt, pred, iou_threshold);
  const MetricsReport id = idf1(gt, pred, iou_threshold);
  clear.idtp = id.idtp;
  clear.idfp = id.idfp;
  clear.idfn = id.idfn;
  clear.idf1 = id.idf1;
  return clear;
}

MetricsReport merge_reports(const std::vector<MetricsReport>& reports) {
  MetricsReport out;
  for (const auto& r : reports) {
    out.ids += r.ids;
    out.frag += r.frag;
    out.fp += r.fp;
    out.fn += r.fn;
    out.idtp += r.idtp;
    out.idfp += r.idfp;
    out.idfn += r.idfn;
    out.mt += r.mt;
    out.ml += r.ml;
    out.gt_boxes += r.gt_boxes;
    out.pred_boxes += r.pred_boxes;
    out.gt_tracks += r.gt_tracks;
  }
  out.mota = out.gt_boxes > 0
                 ? 1.0 - static_cast<double>(out.fn + out.fp + out.ids) / out.gt_boxes
                 : 0.0;
  const long denom = 2 * out.idtp + out.idfp + out.idfn;
  out.idf1 = denom > 0 ? 2.0 * out.idtp / denom : 0.0;
  return out;
}

std::string format_report(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-6s %-6s %5s %5s %6s %6s %4s %4s %7s %6s %6s\n"
                "%-6.3f %-6.3f %5ld %5ld %6ld %6ld %4ld %4ld %7ld %6ld %6ld\n",
                "MOTA", "IDF1", "IDS", "Frag", "FP", "FN", "MT", "ML", "IDTP",
                "IDFP", "IDFN", r.mota, r.idf1, r.ids, r.frag, r.fp, r.fn, r.mt,
                r.ml, r.idtp, r.idfp, r.idfn);
  return buf;
}

std::string report_key_values(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "MOTA %.6f\nIDF1 %.6f\nIDS %ld\nFrag %ld\nFP %ld\nFN %ld\nMT %ld\nML "
                "%ld\nIDTP %ld\nIDFP %ld\nIDFN %ld\nGT %ld\nPRED %ld\n",
                r.mota, r.idf1, r.ids, r.frag, r.fp, r.fn, r.mt, r.ml, r.idtp,
                r.idfp, r.idfn, r.gt_boxes, r.pred_boxes);
  return buf;
}

}  // namespace semitcl
