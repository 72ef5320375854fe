#include "semitcl/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "semitcl/errors.hpp"

namespace semitcl {

namespace {

void check_config(const SimConfig& cfg) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (cfg.num_objects < 0 || cfg.frames < 0) throw BadConfig("counts must be non-negative");
  if (cfg.image_width < 1 || cfg.image_height < 1) throw BadConfig("image size must be positive");
  if (cfg.appearance_dim < 2) throw BadConfig("appearance_dim must be >= 2");
  if (!prob(cfg.direction_change_prob) || !prob(cfg.occlusion_prob) ||
      !prob(cfg.miss_rate))
    throw BadConfig("probabilities must lie in [0, 1]");
  if (cfg.appearance_noise_sigma < 0.0 || cfg.box_jitter_sigma < 0.0 ||
      cfg.false_positive_rate < 0.0)
    throw BadConfig("sigmas and rates must be >= 0");
  if (cfg.speed_min < 0.0 || cfg.speed_max < cfg.speed_min)
    throw BadConfig("speed range invalid");
  if (cfg.box_width_min <= 0.0 || cfg.box_width_max < cfg.box_width_min ||
      cfg.box_height_min <= 0.0 || cfg.box_height_max < cfg.box_height_min)
    throw BadConfig("box size range invalid");
}

// Unit vector supported on the first half of the dimensions.
Eigen::VectorXd sample_latent(int dim, Rng& rng) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  const int half = dim / 2;
  double norm = 0.0;
  while (norm < 1e-12) {
    for (int i = 0; i < half; ++i) v(i) = rng.gaussian();
    norm = v.norm();
  }
  return v / norm;
}

Eigen::VectorXd noisy_feature(const Eigen::VectorXd& latent, double latent_sigma,
                              double nuisance_sigma, Rng& rng) {
  const int dim = static_cast<int>(latent.size());
  const int half = dim / 2;
  Eigen::VectorXd f = latent;
  for (int i = 0; i < half; ++i) f(i) += rng.gaussian(0.0, latent_sigma);
  for (int i = half; i < dim; ++i) f(i) += rng.gaussian(0.0, nuisance_sigma);
  const double norm = f.norm();
  if (norm < 1e-12) return latent;
  return f / norm;
}

int poisson_draw(double lambda, Rng& rng) {
  if (lambda <= 0.0) return 0;
  // Knuth's method; lambda stays small at desk scale.
  const double limit = std::exp(-lambda);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > limit);
  return k - 1;
}

struct SimObject {
  Eigen::VectorXd latent;
  double x, y;       // box center
  double vx, vy;
  double w, h;
  int occluded_until = -1;
};

}  // namespace

Scenario generate_scenario(const SimConfig& cfg) {
  check_config(cfg);
  Rng rng(cfg.seed);
  const double nuisance_sigma =
      cfg.nuisance_noise_sigma < 0.0 ? cfg.appearance_noise_sigma : cfg.nuisance_noise_sigma;

  Scenario scenario;
  scenario.name = cfg.name;
  scenario.frames = cfg.frames;
  scenario.image_width = cfg.image_width;
  scenario.image_height = cfg.image_height;
  scenario.detections.assign(static_cast<std::size_t>(cfg.frames), {});

  std::vector<SimObject> objects;
  objects.reserve(static_cast<std::size_t>(cfg.num_objects));
  for (int i = 0; i < cfg.num_objects; ++i) {
    SimObject obj;
    obj.latent = sample_latent(cfg.appearance_dim, rng);
    obj.w = rng.uniform(cfg.box_width_min, cfg.box_width_max);
    obj.h = rng.uniform(cfg.box_height_min, cfg.box_height_max);
    obj.x = rng.uniform(obj.w / 2.0, cfg.image_width - obj.w / 2.0);
    obj.y = rng.uniform(obj.h / 2.0, cfg.image_height - obj.h / 2.0);
    const double speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    const double angle = rng.uniform(0.0, 2.0 * 3.141592653589793);
    obj.vx = speed * std::cos(angle);
    obj.vy = speed * std::sin(angle);
    objects.push_back(std::move(obj));
    scenario.gt_tracks.push_back(Track{i + 1, {}, TrackSource::annotated});
  }

  auto clamp_box = [&](Box box) {
    box.left = std::clamp(box.left, 0.0, cfg.image_width - box.width);
    box.top = std::clamp(box.top, 0.0, cfg.image_height - box.height);
    return box;
  };

  for (int f = 0; f < cfg.frames; ++f) {
    for (int i = 0; i < cfg.num_objects; ++i) {
      SimObject& obj = objects[i];
      if (f > 0) {
        if (rng.uniform() < cfg.direction_change_prob) {
          const double speed = std::hypot(obj.vx, obj.vy);
          const double angle = rng.uniform(0.0, 2.0 * 3.141592653589793);
          obj.vx = speed * std::cos(angle);
          obj.vy = speed * std::sin(angle);
        }
        obj.x += obj.vx;
        obj.y += obj.vy;
        // Bounce off the image borders.
        if (obj.x - obj.w / 2.0 < 0.0 || obj.x + obj.w / 2.0 > cfg.image_width) {
          obj.vx = -obj.vx;
          obj.x = std::clamp(obj.x, obj.w / 2.0, cfg.image_width - obj.w / 2.0);
        }
        if (obj.y - obj.h / 2.0 < 0.0 || obj.y + obj.h / 2.0 > cfg.image_height) {
          obj.vy = -obj.vy;
          obj.y = std::clamp(obj.y, obj.h / 2.0, cfg.image_height - obj.h / 2.0);
        }
      }

      const Box gt_box = clamp_box(Box{obj.x - obj.w / 2.0, obj.y - obj.h / 2.0, obj.w, obj.h});
      const Eigen::VectorXd feature =
          noisy_feature(obj.latent, cfg.appearance_noise_sigma, nuisance_sigma, rng);

      Instance gt_inst;
      gt_inst.frame = f;
      gt_inst.box = gt_box;
      gt_inst.confidence = 1.0;
      gt_inst.feature = feature;
      gt_inst.identity = scenario.gt_tracks[i].id;
      scenario.gt_tracks[i].instances.push_back(gt_inst);

      if (obj.occluded_until < f && rng.uniform() < cfg.occlusion_prob) {
        obj.occluded_until =
            f + static_cast<int>(rng.uniform_int(1, std::max(1, cfg.occlusion_max_duration)));
      }
      const bool visible = f > obj.occluded_until;
      const bool detected = visible && rng.uniform() >= cfg.miss_rate;
      if (!detected) continue;

      Instance det;
      det.frame = f;
      Box jittered = gt_box;
      if (cfg.box_jitter_sigma > 0.0) {
        jittered.left += rng.gaussian(0.0, cfg.box_jitter_sigma);
        jittered.top += rng.gaussian(0.0, cfg.box_jitter_sigma);
      }
      det.box = clamp_box(jittered);
      det.confidence = rng.uniform(0.5, 1.0);
      det.feature = feature;  // the detector observes the same appearance draw
      scenario.detections[static_cast<std::size_t>(f)].push_back(std::move(det));
    }

    const int fp_count = poisson_draw(cfg.false_positive_rate, rng);
    for (int k = 0; k < fp_count; ++k) {
      Instance det;
      det.frame = f;
      const double w = rng.uniform(cfg.box_width_min, cfg.box_width_max);
      const double h = rng.uniform(cfg.box_height_min, cfg.box_height_max);
      const double x = rng.uniform(w / 2.0, cfg.image_width - w / 2.0);
      const double y = rng.uniform(h / 2.0, cfg.image_height - h / 2.0);
      det.box = clamp_box(Box{x - w / 2.0, y - h / 2.0, w, h});
      det.confidence = rng.uniform(0.1, 0.6);
      det.feature = noisy_feature(sample_latent(cfg.appearance_dim, rng),
                                  cfg.appearance_noise_sigma, nuisance_sigma, rng);
      scenario.detections[static_cast<std::size_t>(f)].push_back(std::move(det));
    }
  }
  return scenario;
}

VideoStats scenario_statistics(const Scenario& scenario) {
  return VideoStats{scenario.name, static_cast<int>(scenario.gt_tracks.size()),
                    scenario.frames};
}

}  // namespace semitcl
