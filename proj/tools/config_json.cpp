#include "config_json.hpp"

#include <set>

namespace hausloss {
namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  require(j.is_object(), ErrorCode::InvalidArgument, std::string(where) + " must be a JSON object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    require(known.count(item.key()) != 0, ErrorCode::InvalidArgument,
            "unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    it->get_to(out);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::vector<std::string> family_names(const std::vector<LossFamily>& families) {
  std::vector<std::string> out;
  for (LossFamily f : families) out.emplace_back(to_string(f));
  return out;
}

}  // namespace

void to_json(json& j, const PerturbationConfig& c) {
  j = json{{"dilate_erode_min", c.dilate_erode_min},
           {"dilate_erode_max", c.dilate_erode_max},
           {"translate", c.translate},
           {"boundary_noise_amp", c.boundary_noise_amp},
           {"boundary_noise_patches", c.boundary_noise_patches}};
}

void from_json(const json& j, PerturbationConfig& c) {
  reject_unknown(j, {"dilate_erode_min", "dilate_erode_max", "translate", "boundary_noise_amp", "boundary_noise_patches"},
                 "perturbation");
  read(j, "dilate_erode_min", c.dilate_erode_min);
  read(j, "dilate_erode_max", c.dilate_erode_max);
  read(j, "translate", c.translate);
  read(j, "boundary_noise_amp", c.boundary_noise_amp);
  read(j, "boundary_noise_patches", c.boundary_noise_patches);
}

void to_json(json& j, const SynthConfig& c) {
  j = json{{"seed", c.seed},
           {"rank", c.rank},
           {"shape", c.shape},
           {"n_blobs", c.n_blobs},
           {"blob_radius_min", c.blob_radius_min},
           {"blob_radius_max", c.blob_radius_max},
           {"fg_fraction_min", c.fg_fraction_min},
           {"fg_fraction_max", c.fg_fraction_max},
           {"border_margin", c.border_margin},
           {"perturbation", c.perturbation},
           {"smoothing_radius", c.smoothing_radius},
           {"max_attempts", c.max_attempts}};
}

void from_json(const json& j, SynthConfig& c) {
  reject_unknown(j,
                 {"seed", "rank", "shape", "n_blobs", "blob_radius_min", "blob_radius_max", "fg_fraction_min",
                  "fg_fraction_max", "border_margin", "perturbation", "smoothing_radius", "max_attempts"},
                 "synth");
  read(j, "seed", c.seed);
  read(j, "rank", c.rank);
  if (j.contains("rank") && !j.contains("shape")) c.shape.assign(static_cast<std::size_t>(c.rank), c.rank == 3 ? 32 : 64);
  read(j, "shape", c.shape);
  read(j, "n_blobs", c.n_blobs);
  read(j, "blob_radius_min", c.blob_radius_min);
  read(j, "blob_radius_max", c.blob_radius_max);
  read(j, "fg_fraction_min", c.fg_fraction_min);
  read(j, "fg_fraction_max", c.fg_fraction_max);
  read(j, "border_margin", c.border_margin);
  if (j.contains("perturbation")) from_json(j.at("perturbation"), c.perturbation);
  read(j, "smoothing_radius", c.smoothing_radius);
  read(j, "max_attempts", c.max_attempts);
  c.validate();
}

void to_json(json& j, const LossParams& c) {
  j = json{{"dt", {{"alpha", c.dt.alpha}, {"sigma", c.dt.sigma}, {"one_sided", c.dt.one_sided}}},
           {"er", {{"k_max", c.er.k_max}, {"alpha", c.er.alpha}, {"soft_threshold_level", c.er.soft_threshold_level}}},
           {"cv", {{"radii", c.cv.radii}, {"alpha", c.cv.alpha}, {"soft_threshold_level", c.cv.soft_threshold_level}}}};
}

void from_json(const json& j, LossParams& c) {
  reject_unknown(j, {"dt", "er", "cv"}, "loss");
  if (j.contains("dt")) {
    const json& d = j.at("dt");
    reject_unknown(d, {"alpha", "sigma", "one_sided"}, "loss.dt");
    read(d, "alpha", c.dt.alpha);
    read(d, "sigma", c.dt.sigma);
    read(d, "one_sided", c.dt.one_sided);
  }
  if (j.contains("er")) {
    const json& e = j.at("er");
    reject_unknown(e, {"k_max", "alpha", "soft_threshold_level"}, "loss.er");
    read(e, "k_max", c.er.k_max);
    read(e, "alpha", c.er.alpha);
    read(e, "soft_threshold_level", c.er.soft_threshold_level);
  }
  if (j.contains("cv")) {
    const json& v = j.at("cv");
    reject_unknown(v, {"radii", "alpha", "soft_threshold_level"}, "loss.cv");
    read(v, "radii", c.cv.radii);
    read(v, "alpha", c.cv.alpha);
    read(v, "soft_threshold_level", c.cv.soft_threshold_level);
  }
  c.dt.validate();
  c.er.validate();
  c.cv.validate();
}

void to_json(json& j, const CorrelationConfig& c) {
  j = json{{"synth", c.synth},
           {"n_pairs", c.n_pairs},
           {"cv_estimator_radii", c.cv_estimator_radii},
           {"er_k_cap", c.er_k_cap},
           {"q_smoothing_radius", c.q_smoothing_radius},
           {"loss", c.loss}};
}

void from_json(const json& j, CorrelationConfig& c) {
  reject_unknown(j, {"synth", "n_pairs", "cv_estimator_radii", "er_k_cap", "q_smoothing_radius", "loss"}, "correlate config");
  if (j.contains("synth")) from_json(j.at("synth"), c.synth);
  c.loss = LossParams::defaults(c.synth.rank);
  read(j, "n_pairs", c.n_pairs);
  read(j, "cv_estimator_radii", c.cv_estimator_radii);
  read(j, "er_k_cap", c.er_k_cap);
  read(j, "q_smoothing_radius", c.q_smoothing_radius);
  if (j.contains("loss")) from_json(j.at("loss"), c.loss);
  require(c.n_pairs >= 2, ErrorCode::InvalidArgument, "n_pairs must be >= 2");
  require(c.q_smoothing_radius >= 0, ErrorCode::InvalidArgument, "q_smoothing_radius must be >= 0");
  if (!c.cv_estimator_radii.empty()) validate_radii(c.cv_estimator_radii);
}

void to_json(json& j, const OptimizeConfig& c) {
  j = json{{"synth", c.synth},
           {"n_cases", c.n_cases},
           {"iterations", c.iterations},
           {"epoch_length", c.epoch_length},
           {"step", c.step},
           {"init_clip", c.init_clip},
           {"families", family_names(c.families)},
           {"loss", c.loss},
           {"divergence_factor", c.divergence_factor}};
}

void from_json(const json& j, OptimizeConfig& c) {
  reject_unknown(j,
                 {"synth", "n_cases", "iterations", "epoch_length", "step", "init_clip", "families", "loss",
                  "divergence_factor"},
                 "optimize config");
  if (j.contains("synth")) from_json(j.at("synth"), c.synth);
  c.loss = LossParams::defaults(c.synth.rank);
  read(j, "n_cases", c.n_cases);
  read(j, "iterations", c.iterations);
  read(j, "epoch_length", c.epoch_length);
  read(j, "step", c.step);
  read(j, "init_clip", c.init_clip);
  if (j.contains("families")) {
    std::vector<std::string> names;
    read(j, "families", names);
    c.families.clear();
    for (const auto& n : names) c.families.push_back(parse_family(n));
  }
  if (j.contains("loss")) from_json(j.at("loss"), c.loss);
  read(j, "divergence_factor", c.divergence_factor);
  require(c.n_cases >= 1 && c.iterations >= 0 && c.epoch_length >= 1 && c.step > 0.0, ErrorCode::InvalidArgument,
          "optimize needs n_cases >= 1, iterations >= 0, epoch_length >= 1 and step > 0");
  require(c.init_clip > 0.0 && c.init_clip < 0.5, ErrorCode::InvalidArgument, "init_clip must lie in (0, 0.5)");
  require(!c.families.empty(), ErrorCode::InvalidArgument, "families must not be empty");
}

json metric_json(const MetricReport& m) {
  return json{{"hd", m.hd},
              {"hd_directed_pq", m.hd_directed_pq},
              {"hd_directed_qp", m.hd_directed_qp},
              {"hd95", m.hd95},
              {"hd90", m.hd90},
              {"partial_hd", m.partial_hd},
              {"partial_k", m.partial_k},
              {"modified_hd", m.modified_hd},
              {"asd", m.asd},
              {"dsc", m.dsc}};
}

}  // namespace hausloss
