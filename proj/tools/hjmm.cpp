#include <hjmm/commands.hpp>

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"HJMM forward-rate solver with Levy-driven linear volatility"};
    app.require_subcommand(1);

    hjmm::CliOptions opt;
    std::uint64_t seed = 0;
    std::string out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON run configuration")->required();
        sub->add_option("--seed", seed, "master seed (overrides mc.master_seed)");
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "output directory (overrides outputs.dir)");
        sub->add_flag("--allow-explosive", opt.allow_explosive, "run solve/mc outside the existence regime");
    };
    auto* classify = app.add_subcommand("classify", "classify the noise into existence/explosion regimes");
    auto* solve = app.add_subcommand("solve", "solve the fixed-point equation on one simulated path");
    auto* verify = app.add_subcommand("verify", "run the invariant suites");
    auto* mc = app.add_subcommand("mc", "Monte Carlo martingale test of discounted bond prices");
    for (auto* sub : {classify, solve, verify, mc}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hjmm::exit_code::kConfig;
    }
    for (auto* sub : {classify, solve, verify, mc}) {
        if (sub->get_option("--seed")->count() > 0) opt.seed = seed;
        if (sub->get_option("--out")->count() > 0) opt.out = out;
    }

    hjmm::init_logging();
    if (*classify) return hjmm::cmd_classify(opt);
    if (*solve) return hjmm::cmd_solve(opt);
    if (*verify) return hjmm::cmd_verify(opt);
    return hjmm::cmd_mc(opt);
}
