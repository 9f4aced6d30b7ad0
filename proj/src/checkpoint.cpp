#include "sacher/checkpoint.hpp"

#include <cstdlib>
#include <fstream>
#include <ios>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace sacher {

namespace {

void write_value(std::ostream& out, double v) { out << std::hexfloat << v << std::defaultfloat; }

// std::istream's hexfloat extraction is unreliable across libstdc++ versions.
double read_value(std::istream& in) {
  std::string token;
  if (!(in >> token)) throw std::runtime_error("checkpoint: unexpected end of file");
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw std::runtime_error("checkpoint: bad numeric token '" + token + "'");
  }
  return v;
}

void expect(std::istream& in, const std::string& word) {
  std::string token;
  if (!(in >> token) || token != word) {
    throw std::runtime_error("checkpoint: expected '" + word + "', found '" + token + "'");
  }
}

template <typename T>
T read_int(std::istream& in) {
  T v{};
  if (!(in >> v)) throw std::runtime_error("checkpoint: expected an integer");
  return v;
}

}  // namespace

const Mlp& Checkpoint::network(const std::string& name) const {
  for (const auto& [n, net] : networks) {
    if (n == name) return net;
  }
  throw std::runtime_error("checkpoint has no network named '" + name + "'");
}

double Checkpoint::scalar(const std::string& name) const {
  auto it = scalars.find(name);
  if (it == scalars.end()) throw std::runtime_error("checkpoint has no scalar named '" + name + "'");
  return it->second;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out << kCheckpointMagic << '\n';
  out << "scalars " << ckpt.scalars.size() << '\n';
  for (const auto& [name, value] : ckpt.scalars) {
    out << name << ' ';
    write_value(out, value);
    out << '\n';
  }
  out << "networks " << ckpt.networks.size() << '\n';
  for (const auto& [name, net] : ckpt.networks) {
    const auto& dims = net.layer_dims();
    out << "network " << name << ' ' << dims.size();
    for (int d : dims) out << ' ' << d;
    out << '\n';
    for (int l = 0; l < net.num_layers(); ++l) {
      const auto w = net.weight(l);
      out << "layer " << l << " weight " << w.rows() << ' ' << w.cols() << '\n';
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
          if (c) out << ' ';
          write_value(out, w(r, c));
        }
        out << '\n';
      }
      const auto b = net.bias(l);
      out << "layer " << l << " bias " << b.size() << '\n';
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (i) out << ' ';
        write_value(out, b(i));
      }
      out << '\n';
    }
  }
  out << "end\n";
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string magic;
  if (!(in >> magic) || magic != kCheckpointMagic) {
    throw std::runtime_error("checkpoint: missing " + std::string(kCheckpointMagic) + " header");
  }
  Checkpoint ckpt;
  expect(in, "scalars");
  const auto num_scalars = read_int<std::size_t>(in);
  for (std::size_t i = 0; i < num_scalars; ++i) {
    std::string name;
    in >> name;
    ckpt.scalars[name] = read_value(in);
  }
  expect(in, "networks");
  const auto num_nets = read_int<std::size_t>(in);
  for (std::size_t n = 0; n < num_nets; ++n) {
    expect(in, "network");
    std::string name;
    in >> name;
    const auto num_dims = read_int<std::size_t>(in);
    std::vector<int> dims(num_dims);
    for (auto& d : dims) d = read_int<int>(in);
    Mlp net(dims);
    for (int l = 0; l < net.num_layers(); ++l) {
      expect(in, "layer");
      if (read_int<int>(in) != l) throw std::runtime_error("checkpoint: layers out of order");
      expect(in, "weight");
      const auto rows = read_int<Eigen::Index>(in);
      const auto cols = read_int<Eigen::Index>(in);
      auto w = net.mutable_weight(l);
      if (rows != w.rows() || cols != w.cols()) {
        throw std::runtime_error("checkpoint: weight shape disagrees with layer dims");
      }
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = read_value(in);
      }
      expect(in, "layer");
      if (read_int<int>(in) != l) throw std::runtime_error("checkpoint: layers out of order");
      expect(in, "bias");
      const auto size = read_int<Eigen::Index>(in);
      auto b = net.mutable_bias(l);
      if (size != b.size()) throw std::runtime_error("checkpoint: bias shape disagrees with layer dims");
      for (Eigen::Index i = 0; i < size; ++i) b(i) = read_value(in);
    }
    ckpt.networks.emplace_back(std::move(name), std::move(net));
  }
  expect(in, "end");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace sacher
