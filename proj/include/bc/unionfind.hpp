#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace bc {

// Union-find with path halving; rebuilt per sweep / per configuration.
class UnionFind {
public:
    UnionFind() = default;
    explicit UnionFind(int n) { reset(n); }

    void reset(int n) {
        parent_.resize(static_cast<std::size_t>(n));
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // returns true if the two elements were in distinct components
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a < b) parent_[b] = a; else parent_[a] = b;
        return true;
    }

    bool connected(int a, int b) { return find(a) == find(b); }

    int size() const { return static_cast<int>(parent_.size()); }

private:
    std::vector<int> parent_;
};

}  // namespace bc
