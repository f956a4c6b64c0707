#include <CLI11.hpp>

#include "anisored/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Reduction and verification tool for 2D anisotropic second-order systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    int grid_n = 0;
    std::string tau_csv;
    double nu = 0.0;
    double ex_a = 0.0, ex_b = 0.0, ex_c = 0.0, ex_f = 0.0;
    std::string field_path;

    const std::vector<std::string> names = {"check",    "factorize", "reduce", "verify",
                                            "example5", "carleman",  "vanish"};
    const std::vector<std::string> descriptions = {
        "symmetry, ellipticity and simple-characteristics checks",
        "spectral right divisor and contour moments",
        "full reduction to the diagonal second-order system",
        "operator-identity residuals with a refinement table",
        "build and verify the worked elasticity family",
        "weighted-norm ratio table for the Carleman diagnostic",
        "vanishing-order slope of a sampled field"};

    std::vector<CLI::App*> subs;
    for (size_t k = 0; k < names.size(); ++k) {
        CLI::App* sub = app.add_subcommand(names[k], descriptions[k]);
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", out_path, "write the JSON report here");
        sub->add_option("--grid-n", grid_n, "override grid.n (odd, >= 9)");
        sub->add_option("--tau", tau_csv, "override carleman.tau (comma-separated)");
        sub->add_option("--nu", nu, "override carleman.nu");
        if (names[k] == "example5") {
            sub->add_option("--a", ex_a, "parameter a")->required();
            sub->add_option("--b", ex_b, "parameter b")->required();
            sub->add_option("--c", ex_c, "parameter c")->required();
            sub->add_option("--f", ex_f, "parameter f")->required();
        }
        if (names[k] == "vanish")
            sub->add_option("--field", field_path, "grid field file (JSON)")->required();
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    anisored::CliOverrides ov;
    std::optional<std::string> cfg_path;
    std::string subcommand;
    for (size_t k = 0; k < subs.size(); ++k) {
        if (!subs[k]->parsed()) continue;
        subcommand = names[k];
        if (subs[k]->count("--config")) cfg_path = config_path;
        if (subs[k]->count("--out")) ov.out_path = out_path;
        if (subs[k]->count("--grid-n")) ov.grid_n = grid_n;
        if (subs[k]->count("--nu")) ov.nu = nu;
        if (subs[k]->count("--tau")) {
            std::vector<double> taus;
            std::stringstream ss(tau_csv);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    taus.push_back(std::stod(item));
                } catch (const std::exception&) {
                    std::cerr << "bad --tau entry: " << item << "\n";
                    return 3;
                }
            }
            ov.tau = taus;
        }
        if (subcommand == "example5") {
            ov.ex5_a = ex_a;
            ov.ex5_b = ex_b;
            ov.ex5_c = ex_c;
            ov.ex5_f = ex_f;
        }
        if (subcommand == "vanish") ov.field_path = field_path;
    }

    return anisored::run_cli(subcommand, cfg_path, ov);
}
