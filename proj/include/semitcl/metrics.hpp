#pragma once

#include <string>
#include <vector>

#include "semitcl/hungarian.hpp"
#include "semitcl/types.hpp"

namespace semitcl {

struct MetricsReport {
  double mota = 0.0;
  double idf1 = 0.0;
  long ids = 0;
  long frag = 0;
  long fp = 0;
  long fn = 0;
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;
  long mt = 0;
  long ml = 0;
  // Totals kept so reports from different sequences can be merged by summing
  // counts before recomputing the ratios.
  long gt_boxes = 0;
  long pred_boxes = 0;
  long gt_tracks = 0;
};

// CLEAR-MOT accumulation: per frame, previous matches persist while still
// overlapping, remaining boxes are Hungarian-matched on 1-IoU, and FP/FN/IDS
// counters feed MOTA = 1 - (FN + FP + IDS) / gt_boxes. MT/ML use 0.8/0.2
// coverage, Frag counts interruptions of each gt's covered span.
MetricsReport clear_mot(const std::vector<Track>& gt, const std::vector<Track>& pred,
                        double iou_threshold = 0.5);

// Identity metrics: one global one-to-one id mapping chosen by Hungarian over
// per-id-pair mismatch counts (dummy-padded), then
// IDF1 = 2*IDTP / (2*IDTP + IDFP + IDFN).
MetricsReport idf1(const std::vector<Track>& gt, const std::vector<Track>& pred,
                   double iou_threshold = 0.5);

// Both metric families in one report.
MetricsReport evaluate(const std::vector<Track>& gt, const std::vector<Track>& pred,
                       double iou_threshold = 0.5);

// Sums counts across sequence reports and recomputes MOTA/IDF1.
MetricsReport merge_reports(const std::vector<MetricsReport>& reports);

// Aligned human-readable table.
std::string format_report(const MetricsReport& report);

// Machine-readable key-value lines (one "key value" per line).
std::string report_key_values(const MetricsReport& report);

}  // namespace semitcl
