// SPDX-License-Identifier: Apache-2.0
//
// Classifies the chi-window pair (a, b, c) = (0.5, 1, 0.75) on a 16-point
// model for a few exponents and compares with the covering-count bounds.

#include <asflab/verdict.hpp>

#include <iostream>

int main() {
    using namespace asflab;

    const GaborTriple synth(0.5, 1.0, 0.75);
    const auto model = build_cyclic_model(synth, synth, 0.25, 4.0);
    const auto pair = indicator_pair(model, synth.win_len, synth.win_len);

    const auto oracle = painless_oracle(synth.shift, synth.mod_step, synth.win_len, model);
    std::cout << "covering bounds: [" << oracle.bounds.lower << ", " << oracle.bounds.upper << "]\n";

    for (double p : {1.5, 2.0, 3.0}) {
        const auto v = asf_verdict(pair, p);
        std::cout << "p=" << p << "  " << to_string(v.classification) << "  lower=" << v.lower
                  << "  upper=" << v.upper << "  condition=" << v.condition << '\n';
    }
}
