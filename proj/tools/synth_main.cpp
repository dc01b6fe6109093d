// abcfs-synth: writes a synthetic binary dataset with known informative columns.

#include <cstdlib>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "abcfs/dataset.hpp"
#include "abcfs/errors.hpp"

int main(int argc, char** argv)
{
    std::size_t samples = 500;
    std::size_t features = 12;
    std::vector<std::size_t> informative{0, 1, 2};
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string label = "class";

    CLI::App app{"Synthetic majority-vote dataset generator"};
    app.add_option("--samples", samples)->capture_default_str();
    app.add_option("--features", features)->capture_default_str();
    app.add_option("--informative", informative)->delimiter(',');
    app.add_option("--noise", noise)->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
    app.add_option("--label-col", label)->capture_default_str();
    app.add_option("--out", out)->required();
    CLI11_PARSE(app, argc, argv);

    try {
        abcfs::write_csv(abcfs::generate_synthetic(samples, features, informative, noise, seed), out, label);
    } catch (const abcfs::Error& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
