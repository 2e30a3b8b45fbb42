#include "warprl/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace warprl::nn {

namespace {
constexpr const char* kMagic = "warprl-qnet";
constexpr int kVersion = 1;

uint64_t to_bits(double d) {
    uint64_t u;
    std::memcpy(&u, &d, sizeof u);
    return u;
}

double from_bits(uint64_t u) {
    double d;
    std::memcpy(&d, &u, sizeof d);
    return d;
}
}  // namespace

void save_checkpoint(const std::string& path, const std::vector<QNetwork>& nets) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << kMagic << " v" << kVersion << "\n";
    out << "nets " << nets.size() << "\n";
    for (const auto& net : nets) {
        out << "dims";
        for (int d : net.dims()) out << ' ' << d;
        out << "\nparams " << net.param_count() << "\n";
        char buf[17];
        int col = 0;
        for (double p : net.params()) {
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(to_bits(p)));
            out << buf << (++col % 8 == 0 ? '\n' : ' ');
        }
        if (col % 8 != 0) out << '\n';
    }
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

std::vector<QNetwork> load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != kMagic || version != "v1")
        throw std::runtime_error("load_checkpoint: unsupported format in " + path);
    std::string key;
    size_t n_nets = 0;
    in >> key >> n_nets;
    if (key != "nets") throw std::runtime_error("load_checkpoint: malformed header in " + path);

    std::vector<QNetwork> nets;
    nets.reserve(n_nets);
    for (size_t k = 0; k < n_nets; ++k) {
        in >> key;
        if (key != "dims") throw std::runtime_error("load_checkpoint: expected dims in " + path);
        std::vector<int> dims;
        // dims run until the "params" keyword
        while (in >> key && key != "params") dims.push_back(std::stoi(key));
        size_t n_params = 0;
        in >> n_params;
        QNetwork net(dims);
        if (net.param_count() != n_params)
            throw std::runtime_error("load_checkpoint: parameter count mismatch in " + path);
        for (size_t i = 0; i < n_params; ++i) {
            std::string tok;
            if (!(in >> tok)) throw std::runtime_error("load_checkpoint: truncated file " + path);
            net.params()[i] = from_bits(std::stoull(tok, nullptr, 16));
        }
        nets.push_back(std::move(net));
    }
    return nets;
}

}  // namespace warprl::nn
