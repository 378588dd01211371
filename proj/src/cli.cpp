#include "spct/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "spct/config.hpp"
#include "spct/dataset.hpp"
#include "spct/decompose.hpp"
#include "spct/metrics.hpp"
#include "spct/png_writer.hpp"
#include "spct/roi.hpp"
#include "spct/spct_io.hpp"

namespace spct {

namespace {

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "run configuration file")->required();
    app->add_option("--set", c.sets, "override, section.key=value (repeatable)");
    app->add_option("--seed", c.seed, "simulation seed, overrides sim.seed");
}

RunConfig load_config(const Common& c)
{
    RunConfig cfg = RunConfig::load(c.config);
    for (const auto& s : c.sets)
        cfg.set_override(s);
    if (c.seed)
        cfg.set("sim.seed", std::to_string(*c.seed));
    return cfg;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text))
        throw IoError("cannot write " + path);
}

std::string fmt(double v)
{
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

MaterialMaps maps_from_file(const SpctFile& f, const RunConfig& cfg)
{
    const SpectralImage img = image_from_spct(f);
    if (f.stage == Stage::image_hu) {
        if (img.num_bins() != 1)
            throw ValidationError("a CT input must have exactly one plane");
        return segment_ct(CtImage { img.grid, img[0] }, segmentation_from(cfg));
    }
    if (f.stage == Stage::concentration)
        return concentration_to_maps(cfg.get_words("decompose.materials"), img);
    throw ValidationError(std::string("cannot simulate from stage ") + stage_name(f.stage));
}

std::vector<std::string> plane_labels(const SpctFile& f, const RunConfig& cfg)
{
    if (f.stage == Stage::concentration) {
        auto names = cfg.get_words("decompose.materials");
        if (names.size() == f.bins)
            return names;
    }
    std::vector<std::string> out;
    for (std::uint32_t m = 0; m < f.bins; ++m)
        out.push_back("bin" + std::to_string(m));
    return out;
}

struct Cli {
    CLI::App app { "Spectral CT simulation, reconstruction and variational denoising toolkit", "spct" };
    std::ostream& out;

    Common phantom_c, import_c, gen_c, sim_c, fbp_c, tvm_c, den_c, dec_c, eval_c, png_c;
    std::string kind = "vials", phantom_out, rois_out;
    std::string import_in, import_out;
    std::string gen_out;
    std::vector<std::string> gen_inputs;
    std::string sim_in, sim_out;
    bool sim_clean = false, sim_counts = false;
    std::string fbp_in, fbp_out;
    std::string tvm_in, tvm_out, tvm_log, tvm_init;
    std::string den_in, den_out, den_trace;
    std::string dec_in, dec_out;
    std::string eval_in, eval_ref, eval_out, eval_rois;
    std::string png_in, png_out;
    int png_bin = 0;
    double png_lo = -200.0, png_hi = 400.0;
    bool png_raw = false;

    CLI::App *phantom, *import_raw, *gen, *sim, *recon, *fbp_cmd, *tvm_cmd, *den, *dec, *eval, *png;

    explicit Cli(std::ostream& o)
        : out(o)
    {
        app.require_subcommand(1);

        phantom = app.add_subcommand("phantom", "write a built-in phantom");
        add_common(phantom, phantom_c);
        phantom->add_option("--kind", kind, "vials (concentration maps) or body (HU)")
            ->check(CLI::IsMember({ "vials", "body" }));
        phantom->add_option("--out", phantom_out, "output SPCT file")->required();
        phantom->add_option("--rois", rois_out, "write the vial ROIs here");

        import_raw = app.add_subcommand("import-raw", "convert a headerless f32 HU slice to SPCT");
        add_common(import_raw, import_c);
        import_raw->add_option("--input", import_in, "little-endian f32, geometry.width x geometry.height")->required();
        import_raw->add_option("--out", import_out, "output SPCT file (stage image-hu)")->required();

        gen = app.add_subcommand("gen-dataset", "simulate paired clean/noisy reconstructions");
        add_common(gen, gen_c);
        gen->add_option("--out-dir", gen_out, "output directory")->required();
        gen->add_option("--input", gen_inputs, "HU or concentration SPCT inputs; default is dataset.source");

        sim = app.add_subcommand("simulate", "spectral sinogram of an object");
        add_common(sim, sim_c);
        sim->add_option("--input", sim_in, "HU image or concentration maps")->required();
        sim->add_option("--out", sim_out, "output sinogram")->required();
        sim->add_flag("--clean", sim_clean, "skip Poisson noise");
        sim->add_flag("--counts", sim_counts, "write photon counts instead of line integrals");

        recon = app.add_subcommand("recon", "reconstruct a line-integral sinogram");
        recon->require_subcommand(1);
        fbp_cmd = recon->add_subcommand("fbp", "filtered back projection");
        add_common(fbp_cmd, fbp_c);
        fbp_cmd->add_option("--input", fbp_in)->required();
        fbp_cmd->add_option("--out", fbp_out)->required();
        tvm_cmd = recon->add_subcommand("tvm", "total-variation iterative reconstruction");
        add_common(tvm_cmd, tvm_c);
        tvm_cmd->add_option("--input", tvm_in)->required();
        tvm_cmd->add_option("--out", tvm_out)->required();
        tvm_cmd->add_option("--log", tvm_log, "CSV iter,data_residual,tv_value per bin");
        tvm_cmd->add_option("--init", tvm_init, "starting image");

        den = app.add_subcommand("denoise", "variational denoising with the ULTRA objective");
        add_common(den, den_c);
        den->add_option("--input", den_in)->required();
        den->add_option("--out", den_out)->required();
        den->add_option("--trace", den_trace, "CSV loss trace");

        dec = app.add_subcommand("decompose", "per-pixel material decomposition");
        add_common(dec, dec_c);
        dec->add_option("--input", dec_in, "multi-bin attenuation image")->required();
        dec->add_option("--out", dec_out)->required();

        eval = app.add_subcommand("evaluate", "image metrics against a reference");
        add_common(eval, eval_c);
        eval->add_option("--input", eval_in)->required();
        eval->add_option("--reference", eval_ref)->required();
        eval->add_option("--out", eval_out, "metrics CSV")->required();
        eval->add_option("--rois", eval_rois, "ROI file for relative bias");

        png = app.add_subcommand("export-png", "windowed 8-bit PNG of one plane");
        add_common(png, png_c);
        png->add_option("--input", png_in)->required();
        png->add_option("--out", png_out)->required();
        png->add_option("--bin", png_bin, "plane index");
        png->add_option("--lo", png_lo, "window low");
        png->add_option("--hi", png_hi, "window high");
        png->add_flag("--raw", png_raw, "window stored values without HU conversion");
    }

    void run()
    {
        if (phantom->parsed())
            run_phantom();
        else if (import_raw->parsed())
            run_import();
        else if (gen->parsed())
            run_gen();
        else if (sim->parsed())
            run_simulate();
        else if (fbp_cmd->parsed())
            run_fbp();
        else if (tvm_cmd->parsed())
            run_tvm();
        else if (den->parsed())
            run_denoise();
        else if (dec->parsed())
            run_decompose();
        else if (eval->parsed())
            run_evaluate();
        else if (png->parsed())
            run_png();
    }

    void run_phantom()
    {
        const RunConfig cfg = load_config(phantom_c);
        if (kind == "body") {
            const CtImage ct = body_phantom(geometry_from(cfg).grid());
            SpectralImage img(ct.grid, 1);
            img[0] = ct.hu;
            write_spct(phantom_out, to_spct(img, Stage::image_hu));
        } else {
            const VialPhantom ph = make_vial_phantom(vial_params_from(cfg));
            write_spct(phantom_out, to_spct(ph.concentrations, Stage::concentration));
            if (!rois_out.empty())
                save_rois(rois_out, ph.rois);
        }
        out << "wrote " << phantom_out << '\n';
    }

    void run_import()
    {
        const RunConfig cfg = load_config(import_c);
        const CtImage ct = read_raw_hu(import_in, geometry_from(cfg).grid());
        SpectralImage img(ct.grid, 1);
        img[0] = ct.hu;
        write_spct(import_out, to_spct(img, Stage::image_hu));
        out << "wrote " << import_out << '\n';
    }

    void run_gen()
    {
        const RunConfig cfg = load_config(gen_c);
        const FanBeamGeometry geom = geometry_from(cfg);
        DatasetOptions opts;
        opts.segmentation = segmentation_from(cfg);
        opts.fbp = fbp_from(cfg);
        opts.patch_size = static_cast<int>(cfg.get_int("dataset.patch_size"));
        opts.patch_stride = static_cast<int>(cfg.get_int("dataset.patch_stride"));
        opts.config_hash = cfg.hash();

        std::vector<MaterialMaps> inputs;
        std::optional<VialPhantom> vials;
        for (const auto& p : gen_inputs)
            inputs.push_back(maps_from_file(read_spct(p), cfg));
        if (inputs.empty()) {
            const auto& source = cfg.get("dataset.source");
            if (source == "vials") {
                vials = make_vial_phantom(vial_params_from(cfg));
                inputs.push_back(concentration_to_maps(vials->materials, vials->concentrations));
            } else if (source == "body") {
                inputs.push_back(segment_ct(body_phantom(geom.grid()), opts.segmentation));
            } else {
                throw ValidationError("config: dataset.source must be vials or body");
            }
        }
        const auto man = generate_dataset(inputs, geom, sim_from(cfg), opts, gen_out);
        if (vials) {
            save_rois(std::filesystem::path(gen_out) / "rois.csv", vials->rois);
            write_spct(std::filesystem::path(gen_out) / "truth_0000.spct",
                       to_spct(vials->concentrations, Stage::concentration));
        }
        out << "wrote " << man.rows.size() << " image pairs";
        if (!man.patches.empty())
            out << " and " << man.patches.size() << " patch pairs";
        out << " to " << gen_out << '\n';
    }

    void run_simulate()
    {
        const RunConfig cfg = load_config(sim_c);
        const FanBeamGeometry geom = geometry_from(cfg);
        SimConfig sc = sim_from(cfg);
        const MaterialMaps maps = maps_from_file(read_spct(sim_in), cfg);
        if (sim_counts) {
            Sinogram counts = spectral_counts(maps, geom, sc);
            if (sc.noise && !sim_clean)
                counts = add_poisson(counts, sc.seed);
            write_spct(sim_out, to_spct(counts));
        } else {
            sc.noise = sc.noise && !sim_clean;
            const SimulatedScan scan = simulate_scan(maps, geom, sc);
            write_spct(sim_out, to_spct(scan.noisy));
        }
        out << "wrote " << sim_out << '\n';
    }

    void run_fbp()
    {
        const RunConfig cfg = load_config(fbp_c);
        const Sinogram s = sinogram_from_spct(read_spct(fbp_in));
        write_spct(fbp_out, to_spct(fbp(s, geometry_from(cfg), fbp_from(cfg)), Stage::image_mu));
        out << "wrote " << fbp_out << '\n';
    }

    void run_tvm()
    {
        const RunConfig cfg = load_config(tvm_c);
        const Sinogram s = sinogram_from_spct(read_spct(tvm_in));
        std::optional<SpectralImage> init;
        if (!tvm_init.empty())
            init = image_from_spct(read_spct(tvm_init));
        std::vector<std::vector<TvmLogEntry>> logs;
        const SpectralImage img = tvm_reconstruct(s, geometry_from(cfg), tvm_from(cfg), init ? &*init : nullptr,
                                                  tvm_log.empty() ? nullptr : &logs);
        write_spct(tvm_out, to_spct(img, Stage::image_mu));
        if (!tvm_log.empty()) {
            std::string text = "bin,iter,data_residual,tv_value\n";
            for (std::size_t m = 0; m < logs.size(); ++m)
                for (const auto& e : logs[m])
                    text += std::to_string(m) + ',' + std::to_string(e.iter) + ',' + fmt(e.data_residual) + ','
                        + fmt(e.tv_value) + '\n';
            write_text(tvm_log, text);
        }
        out << "wrote " << tvm_out << '\n';
    }

    void run_denoise()
    {
        const RunConfig cfg = load_config(den_c);
        const SpctFile f = read_spct(den_in);
        const auto res = variational_denoise(image_from_spct(f), denoise_from(cfg));
        write_spct(den_out, to_spct(res.image, f.stage));
        if (!den_trace.empty()) {
            std::string text = "epoch,total_loss,lp_term,atv_term\n";
            for (const auto& r : res.trace)
                text += std::to_string(r.epoch) + ',' + fmt(r.total_loss) + ',' + fmt(r.lp_term) + ','
                    + fmt(r.atv_term) + '\n';
            write_text(den_trace, text);
        }
        out << "wrote " << den_out << '\n';
    }

    void run_decompose()
    {
        const RunConfig cfg = load_config(dec_c);
        const SpctFile f = read_spct(dec_in);
        if (f.stage != Stage::image_mu)
            throw ValidationError(std::string("decompose expects an image-mu stack, got ") + stage_name(f.stage));
        const SimConfig sc = sim_from(cfg);
        const auto basis = make_basis(cfg.get_words("decompose.materials"), sc.spectrum, sc.bins);
        const auto conc = decompose(image_from_spct(f), basis);
        write_spct(dec_out, to_spct(conc.maps, Stage::concentration));
        out << "wrote " << dec_out << " (basis condition number " << basis.condition_number() << ")\n";
    }

    void run_evaluate()
    {
        const RunConfig cfg = load_config(eval_c);
        const SpctFile fx = read_spct(eval_in), fr = read_spct(eval_ref);
        if (fx.stage != fr.stage)
            throw ValidationError(std::string("evaluate: stage ") + stage_name(fx.stage) + " vs reference stage "
                                  + stage_name(fr.stage));
        const SpectralImage x = image_from_spct(fx), ref = image_from_spct(fr);
        check_same_shape(x, ref, "evaluate");
        SpectralImage xm = x, rm = ref;
        if (fx.stage == Stage::image_mu && cfg.get("evaluate.units") == "hu") {
            const SimConfig sc = sim_from(cfg);
            const auto water = bin_water_mu(sc.spectrum, sc.bins);
            xm = stack_to_hu(x, water);
            rm = stack_to_hu(ref, water);
        } else if (cfg.get("evaluate.units") != "hu" && cfg.get("evaluate.units") != "mu") {
            throw ValidationError("config: evaluate.units must be hu or mu");
        }
        const auto labels = plane_labels(fx, cfg);
        const double fixed_range = cfg.get_double("evaluate.dynamic_range");
        std::string text = "metric,bin_or_material,value\n";
        for (int m = 0; m < x.num_bins(); ++m) {
            const double range = fixed_range > 0.0 ? fixed_range : rm[m].maxCoeff() - rm[m].minCoeff();
            text += "rmse," + labels[m] + ',' + fmt(rmse(xm[m], rm[m])) + '\n';
            if (range > 0.0) {
                text += "ssim," + labels[m] + ',' + fmt(ssim(xm[m], rm[m], range)) + '\n';
                text += "psnr," + labels[m] + ',' + fmt(psnr(xm[m], rm[m], range)) + '\n';
            }
        }
        if (!eval_rois.empty())
            for (const auto& roi : load_rois(eval_rois)) {
                const Mask mask = roi.mask(x.grid);
                for (int m = 0; m < x.num_bins(); ++m) {
                    // relative bias is undefined where the reference vanishes
                    if ((mask && ref[m] == 0.0).any() || !mask.any())
                        continue;
                    text += "rb:" + roi.name + ',' + labels[m] + ',' + fmt(relative_bias(x[m], ref[m], mask)) + '\n';
                }
            }
        write_text(eval_out, text);
        out << "wrote " << eval_out << '\n';
    }

    void run_png()
    {
        const RunConfig cfg = load_config(png_c);
        const SpctFile f = read_spct(png_in);
        SpectralImage img = image_from_spct(f);
        if (png_bin < 0 || png_bin >= img.num_bins())
            throw OutOfRangeError("--bin " + std::to_string(png_bin) + " outside 0.." + std::to_string(img.num_bins() - 1));
        if (f.stage == Stage::image_mu && !png_raw) {
            const SimConfig sc = sim_from(cfg);
            img = stack_to_hu(img, bin_water_mu(sc.spectrum, sc.bins));
        }
        write_png(img[png_bin], png_lo, png_hi, png_out);
        out << "wrote " << png_out << '\n';
    }
};

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Cli cli(out);
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        cli.app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << cli.app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << cli.app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << cli.app.help("", CLI::AppFormatMode::All);
        return 1;
    }
    try {
        cli.run();
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return 2;
    }
}

int run_cli(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace spct
