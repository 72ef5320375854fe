#include "semitcl/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "semitcl/errors.hpp"

namespace semitcl {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'M', 'I', 'T', 'C', 'L', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

void put_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v(i));
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

double get_f64(std::ifstream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, 1);  // version
  put_u32(out, static_cast<std::uint32_t>(ckpt.encoder.input_dim()));
  put_u32(out, static_cast<std::uint32_t>(ckpt.encoder.hidden_dim()));
  put_u32(out, static_cast<std::uint32_t>(ckpt.encoder.embed_dim()));
  put_u32(out, ckpt.epoch);
  put_f64(out, ckpt.running_loss);
  for (std::uint64_t w : ckpt.rng_state) put_u64(out, w);
  put_matrix(out, ckpt.encoder.w1);
  put_vector(out, ckpt.encoder.b1);
  put_matrix(out, ckpt.encoder.w2);
  put_vector(out, ckpt.encoder.b2);
  put_u32(out, static_cast<std::uint32_t>(ckpt.train_config_json.size()));
  out.write(ckpt.train_config_json.data(),
            static_cast<std::streamsize>(ckpt.train_config_json.size()));
  if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a checkpoint file: " + path);
  const std::uint32_t version = get_u32(in);
  if (version != 1) throw IoError("unsupported checkpoint version");
  const std::uint32_t input = get_u32(in);
  const std::uint32_t hidden = get_u32(in);
  const std::uint32_t embed = get_u32(in);

  Checkpoint ckpt;
  ckpt.epoch = get_u32(in);
  ckpt.running_loss = get_f64(in);
  for (auto& w : ckpt.rng_state) w = get_u64(in);
  ckpt.encoder.w1.resize(hidden, input);
  for (std::uint32_t r = 0; r < hidden; ++r)
    for (std::uint32_t c = 0; c < input; ++c) ckpt.encoder.w1(r, c) = get_f64(in);
  ckpt.encoder.b1.resize(hidden);
  for (std::uint32_t i = 0; i < hidden; ++i) ckpt.encoder.b1(i) = get_f64(in);
  ckpt.encoder.w2.resize(embed, hidden);
  for (std::uint32_t r = 0; r < embed; ++r)
    for (std::uint32_t c = 0; c < hidden; ++c) ckpt.encoder.w2(r, c) = get_f64(in);
  ckpt.encoder.b2.resize(embed);
  for (std::uint32_t i = 0; i < embed; ++i) ckpt.encoder.b2(i) = get_f64(in);
  const std::uint32_t json_len = get_u32(in);
  ckpt.train_config_json.resize(json_len);
  in.read(ckpt.train_config_json.data(), json_len);
  if (!in) throw IoError("truncated checkpoint: " + path);
  return ckpt;
}

}  // namespace semitcl
