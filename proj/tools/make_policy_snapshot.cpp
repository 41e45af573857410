// Writes the reference encoder/decoder outputs compared by the policy tests.

#include <iostream>

#include "cpdptw/cpdptw.hpp"

using namespace cpdptw;

int main(int argc, char** argv) {
    const Instance inst = generate(3, 1, 3.0, WindowProfile::Uniform, 2024);
    const Simulator sim(inst, make_fleet(inst, 1, 1), build_network(inst));
    const WeightSet w = random_weights(7);
    const Embedding h = encode(make_policy_graph(sim), w);
    const SimState s = sim.reset();
    const ScoreMatrix p = AttentionScorer(w)(sim, s, sim.feasible_mask(s));
    nlohmann::json doc{{"instance_seed", 2024}, {"weights_seed", 7}, {"mean", h.mean}, {"probabilities", p},
                       {"node0", std::vector<double>(h.row(0), h.row(0) + kEmbed)}};
    const std::string text = doc.dump(1);
    if (argc > 1) detail::write_json_file(argv[1], doc);
    else std::cout << text << '\n';
}
