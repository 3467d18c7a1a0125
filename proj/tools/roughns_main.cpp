// Command-line front end of the rough Navier-Stokes laboratory. Talks to the
// shared library exclusively through its C interface.
#include <roughns.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int cmd_run(const std::string& config, const std::string& output_root, bool from_preset) {
    int exit_code = 0;
    char message[1024] = {0};
    roughns_status st;
    if (from_preset) {
        const char* text = roughns_preset_config(config.c_str());
        if (text == nullptr) {
            std::fprintf(stderr, "error: unknown preset '%s'\n", config.c_str());
            return 2;
        }
        st = roughns_experiment_run_text(text, output_root.empty() ? nullptr : output_root.c_str(),
                                         &exit_code, message, sizeof(message));
    } else {
        st = roughns_experiment_run(config.c_str(),
                                    output_root.empty() ? nullptr : output_root.c_str(),
                                    &exit_code, message, sizeof(message));
    }
    if (st != ROUGHNS_OK) {
        std::fprintf(stderr, "error: %s\n", roughns_last_error());
        return 3;
    }
    if (exit_code == 0) {
        std::printf("pass: %s\n", message);
    } else if (exit_code == 1) {
        std::printf("FAIL: %s\n", message);
    } else {
        std::fprintf(stderr, "error (%d): %s\n", exit_code, message);
    }
    return exit_code;
}

int cmd_presets() {
    const int n = roughns_preset_count();
    for (int i = 0; i < n; ++i)
        std::printf("%-22s %s\n", roughns_preset_name(i), roughns_preset_description(i));
    return 0;
}

int cmd_validate(const std::string& config) {
    char message[1024] = {0};
    if (roughns_config_validate(config.c_str(), message, sizeof(message)) == ROUGHNS_OK) {
        std::printf("ok\n");
        return 0;
    }
    std::fprintf(stderr, "invalid config: %s\n", message);
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("roughns ") + roughns_version() +
                 " - rough-path-perturbed Navier-Stokes laboratory"};
    app.require_subcommand(1);

    std::string config, output_root, preset;

    auto* run = app.add_subcommand("run", "run an experiment config (JSON)");
    run->add_option("config", config, "config file path")->required();
    run->add_option("-o,--output-root", output_root,
                    "root for relative output directories (also ROUGHNS_OUTPUT_ROOT)");

    auto* presets = app.add_subcommand("presets", "list built-in experiment presets");
    auto* preset_run = app.add_subcommand("preset", "run a built-in preset by name");
    preset_run->add_option("name", preset, "preset name")->required();
    preset_run->add_option("-o,--output-root", output_root, "root for output directories");
    auto* preset_show = app.add_subcommand("preset-config", "print a preset's config JSON");
    preset_show->add_option("name", preset, "preset name")->required();

    auto* validate = app.add_subcommand("validate", "validate a config without running it");
    validate->add_option("config", config, "config file path")->required();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(run)) return cmd_run(config, output_root, false);
    if (app.got_subcommand(presets)) return cmd_presets();
    if (app.got_subcommand(preset_run)) return cmd_run(preset, output_root, true);
    if (app.got_subcommand(preset_show)) {
        const char* text = roughns_preset_config(preset.c_str());
        if (text == nullptr) {
            std::fprintf(stderr, "error: unknown preset '%s'\n", preset.c_str());
            return 2;
        }
        std::printf("%s\n", text);
        return 0;
    }
    if (app.got_subcommand(validate)) return cmd_validate(config);
    return 2;
}
