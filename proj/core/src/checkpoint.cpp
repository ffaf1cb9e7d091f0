#include "sectar/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>
#include <vector>

#include "binary_io.hpp"

namespace sectar {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'C', 'T', 'A', 'R', '1', '\n'};

}  // namespace

void save_checkpoint(const ParamRegistry& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  for (const auto& [name, t] : params.items()) {
    bin::put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    bin::put_u32(os, static_cast<std::uint32_t>(t->rank()));
    for (int d = 0; d < t->rank(); ++d)
      bin::put_u32(os, static_cast<std::uint32_t>(t->dim(d)));
    for (int i = 0; i < t->size(); ++i) bin::put_f64(os, t->at(i));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

void load_checkpoint(ParamRegistry& params, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);

  std::set<std::string> seen;
  std::uint32_t name_len = 0;
  while (bin::try_get_u32(is, name_len)) {
    if (name_len == 0 || name_len > 4096)
      throw std::runtime_error("checkpoint: implausible name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len))
      throw std::runtime_error("checkpoint: truncated name");
    std::uint32_t rank = 0;
    if (!bin::try_get_u32(is, rank) || rank > 8)
      throw std::runtime_error("checkpoint: bad rank for " + name);
    std::vector<int> shape(rank);
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      std::uint32_t dim = 0;
      if (!bin::try_get_u32(is, dim) || dim == 0)
        throw std::runtime_error("checkpoint: bad dimension for " + name);
      shape[d] = static_cast<int>(dim);
      n *= dim;
    }
    Tensor* dst = params.find(name);
    if (dst == nullptr)
      throw std::runtime_error("checkpoint: unknown parameter " + name);
    if (dst->shape() != shape)
      throw std::runtime_error("checkpoint: shape mismatch for " + name);
    for (std::size_t i = 0; i < n; ++i) dst->at(static_cast<int>(i)) = bin::get_f64(is, "checkpoint");
    seen.insert(name);
  }
  if (seen.size() != params.count())
    throw std::runtime_error("checkpoint: file is missing parameters (" +
                             std::to_string(seen.size()) + " of " +
                             std::to_string(params.count()) + ")");
}

}  // namespace sectar
