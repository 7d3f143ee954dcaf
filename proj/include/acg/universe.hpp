// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace acg {

/// The ordered variable set a scalar value ranges over.  Shared by every
/// value of one analysis; operations on values from different universes are
/// programming errors.
class Universe {
  public:
    explicit Universe(std::vector<std::string> names) : names_(std::move(names)) {
        for (size_t i = 0; i < names_.size(); ++i) {
            if (!index_.emplace(names_[i], i).second) {
                throw std::invalid_argument("duplicate variable in universe: " + names_[i]);
            }
        }
    }

    size_t size() const { return names_.size(); }
    const std::string& name(size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }

    bool contains(const std::string& v) const { return index_.count(v) != 0; }
    size_t index_of(const std::string& v) const {
        auto it = index_.find(v);
        if (it == index_.end()) {
            throw std::invalid_argument("variable not in universe: " + v);
        }
        return it->second;
    }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, size_t> index_;
};

using UniversePtr = std::shared_ptr<const Universe>;

inline UniversePtr make_universe(std::vector<std::string> names) {
    return std::make_shared<const Universe>(std::move(names));
}

inline void check_same_universe(const UniversePtr& a, const UniversePtr& b) {
    if (a != b && (!a || !b || a->names() != b->names())) {
        throw std::logic_error("scalar domain operation across different universes");
    }
}

} // namespace acg
