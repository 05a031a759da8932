#include "hh/isotonic.hpp"

#include <algorithm>

#include "hh/error.hpp"

namespace hh {

void isotonic_nonincreasing_inplace(std::span<double> y, std::span<const double> w) {
    if (y.size() != w.size()) fail(ErrorCode::InvalidParameter, "isotonic: weights and values differ in length");
    struct Block {
        double mean;
        double weight;
        std::size_t len;
    };
    std::vector<Block> st;
    st.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        Block b{y[i], std::max(w[i], 1e-300), 1};
        while (!st.empty() && st.back().mean < b.mean) {
            const Block& t = st.back();
            const double W = t.weight + b.weight;
            b = Block{(t.mean * t.weight + b.mean * b.weight) / W, W, t.len + b.len};
            st.pop_back();
        }
        st.push_back(b);
    }
    std::size_t k = 0;
    for (const Block& b : st)
        for (std::size_t j = 0; j < b.len; ++j) y[k++] = b.mean;
}

std::vector<double> isotonic_nonincreasing(std::span<const double> y, std::span<const double> w) {
    std::vector<double> out(y.begin(), y.end());
    isotonic_nonincreasing_inplace(out, w);
    return out;
}

}  // namespace hh
