#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "marllb/nn/checkpoint.hpp"

namespace marllb::nn {

namespace {
constexpr const char* kMagic = "MARLLB-CKPT v1";
}

void save_checkpoint(const std::string& path, std::uint64_t config_hash,
                     const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << kMagic << "\n";
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  out << "config " << hex << "\n";
  char buf[64];
  for (const NamedTensor& named : tensors) {
    const Tensor& t = *named.tensor;
    out << "tensor " << named.name << " " << t.rows << " " << t.cols << "\n";
    for (std::size_t r = 0; r < t.rows; ++r) {
      for (std::size_t c = 0; c < t.cols; ++c) {
        std::snprintf(buf, sizeof(buf), "%a", t.at(r, c));
        out << buf << (c + 1 == t.cols ? "" : " ");
      }
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

std::uint64_t load_checkpoint(const std::string& path,
                              const std::vector<NamedTensor>& tensors) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw std::runtime_error("checkpoint magic mismatch in " + path);
  if (!std::getline(in, line))
    throw std::runtime_error("checkpoint missing config line");
  std::istringstream cfg(line);
  std::string tag, hex;
  cfg >> tag >> hex;
  if (tag != "config" || hex.empty())
    throw std::runtime_error("checkpoint config line malformed");
  const std::uint64_t config_hash = std::stoull(hex, nullptr, 16);

  for (const NamedTensor& named : tensors) {
    if (!std::getline(in, line))
      throw std::runtime_error("checkpoint truncated before " + named.name);
    std::istringstream header(line);
    std::string kind, name;
    std::size_t rows = 0, cols = 0;
    header >> kind >> name >> rows >> cols;
    Tensor& t = *named.tensor;
    if (kind != "tensor" || name != named.name)
      throw std::runtime_error("checkpoint tensor order mismatch: expected " +
                               named.name + ", found " + name);
    if (rows != t.rows || cols != t.cols)
      throw std::runtime_error("checkpoint shape mismatch for " + named.name);
    for (std::size_t r = 0; r < t.rows; ++r) {
      if (!std::getline(in, line))
        throw std::runtime_error("checkpoint payload truncated in " +
                                 named.name);
      std::istringstream row(line);
      std::string token;
      for (std::size_t c = 0; c < t.cols; ++c) {
        if (!(row >> token))
          throw std::runtime_error("checkpoint row too short in " + named.name);
        t.at(r, c) = std::strtod(token.c_str(), nullptr);
      }
    }
  }
  if (!std::getline(in, line) || line != "end")
    throw std::runtime_error("checkpoint missing end marker");
  return config_hash;
}

}  // namespace marllb::nn
