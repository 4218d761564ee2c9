#include "helivort/particles.hpp"

#include <algorithm>
#include <string>

#include "helivort/error.hpp"

namespace helivort {

DiskDomain::DiskDomain(double radius) : radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ConfigError("disk radius must be finite and > 0");
    }
}

ParticleSystem::ParticleSystem(HelixParams params_, DiskDomain domain_, double eps_, double delta_)
    : params(params_), domain(domain_), eps(eps_), delta(delta_) {
    if (!(delta > 0.0)) throw ConfigError("regularization length delta must be > 0");
    if (!(eps > 0.0)) throw ConfigError("concentration scale eps must be > 0");
}

int ParticleSystem::blob_count() const {
    return blob_id.empty() ? 0 : *std::max_element(blob_id.begin(), blob_id.end()) + 1;
}

double ParticleSystem::circulation(int blob) const {
    double total = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
        if (blob_id[k] == blob) total += weights[k];
    }
    return total;
}

void ParticleSystem::add(const Point2 &position, double weight, int blob) {
    positions.push_back(position);
    weights.push_back(weight);
    blob_id.push_back(blob);
}

void ParticleSystem::validate() const {
    if (weights.size() != positions.size() || blob_id.size() != positions.size()) {
        throw ConfigError("particle arrays have mismatched lengths");
    }
    for (std::size_t k = 0; k < size(); ++k) {
        if (!std::isfinite(positions[k].x) || !std::isfinite(positions[k].y) || !std::isfinite(weights[k])) {
            throw ConfigError("particle " + std::to_string(k) + " has non-finite data");
        }
        if (blob_id[k] < 0) throw ConfigError("negative blob id");
        if (!domain.contains(positions[k])) {
            throw ConfigError("particle " + std::to_string(k) + " lies outside the disk");
        }
    }
}

}  // namespace helivort
