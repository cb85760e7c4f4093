from importlib import resources

from primegaps.cli import main


def data_path(name):
    return str(resources.files("primegaps").joinpath("data", name))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestTupleCommands:
    def test_find_writes_file(self, capsys, tmp_path):
        out_file = tmp_path / "t.txt"
        code, out = run(capsys, "tuple", "find", "--k", "11", "--method", "eratosthenes",
                        "--out", str(out_file))
        assert code == 0 and "diameter=" in out
        code, out = run(capsys, "tuple", "verify", str(out_file))
        assert code == 0 and "admissible=yes" in out

    def test_find_shifted(self, capsys):
        code, out = run(capsys, "tuple", "find", "--k", "7", "--method", "shifted-greedy",
                        "--shift", "0")
        assert code == 0 and "k=7" in out

    def test_verify_rejects_inadmissible(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("0\n2\n4\n")
        code, out = run(capsys, "tuple", "verify", str(bad))
        assert code == 1 and "admissible=no" in out

    def test_verify_reference(self, capsys):
        code, out = run(capsys, "tuple", "verify", data_path("tuple_50_246.txt"))
        assert code == 0 and "diameter=246" in out

    def test_hsmall(self, capsys):
        code, out = run(capsys, "tuple", "hsmall", "--k", "3", "--dmax", "10")
        assert code == 0 and "6" in out


class TestBoundCommands:
    def test_krylov_roundtrip(self, capsys, tmp_path):
        cert = tmp_path / "c.txt"
        code, out = run(capsys, "mk", "krylov", "--k", "2", "--n", "6", "--out", str(cert))
        assert code == 0 and "verified" in out
        code, out = run(capsys, "verify-cert", str(cert))
        assert code == 0 and "verified" in out

    def test_basis(self, capsys):
        code, out = run(capsys, "mk", "basis", "--k", "3", "--d", "2")
        assert code == 0 and "plain(3)" in out

    def test_mkeps(self, capsys, tmp_path):
        cert = tmp_path / "c.txt"
        code, out = run(capsys, "mkeps", "basis", "--k", "2", "--d", "2", "--eps", "1/4",
                        "--out", str(cert))
        assert code == 0
        code, out = run(capsys, "verify-cert", str(cert))
        assert code == 0

    def test_scalar_commands(self, capsys):
        assert run(capsys, "m2exact")[0] == 0
        assert run(capsys, "m2eps", "--eps", "1/3")[0] == 0
        assert run(capsys, "bessel", "--k", "6")[0] == 0
        code, out = run(capsys, "m4eps", "--eps", "21/125", "--alpha", "98/125")
        assert code == 0 and "4J/I" in out

    def test_asympt(self, capsys):
        code, out = run(capsys, "asympt", "--k", "5511", "--theta", "0.965", "--beta", "0.973")
        assert code == 0 and "lower_bound = 6.0000486" in out

    def test_error_exit_code(self, capsys):
        code = main(["m2eps", "--eps", "7/2"])
        assert code == 2


class TestCutoffCommands:
    def test_verify(self, capsys):
        code, out = run(capsys, "cutoff3d", "verify")
        assert code == 0
        assert "I = 62082439864241/507343011840" in out
        assert "J = 9933190664926733/40587440947200" in out
        assert "ratio exceeds 2: yes" in out

    def test_eval(self, capsys):
        code, out = run(capsys, "cutoff3d", "eval", "--piece", "H_xyz", "--at", "0,0,1/2")
        assert code == 0 and "= 4" in out


class TestChainCommands:
    def test_h1_246_chain(self, capsys, tmp_path):
        report = tmp_path / "r.txt"
        code, out = run(capsys, "chain", "hm", "--dhl-rule", "eps", "--k", "50", "--m", "1",
                        "--eps", "1/25", "--hyp", "BV", "--cert-value", "4.0043",
                        "--cert-source", "published-value",
                        "--tuple", data_path("tuple_50_246.txt"), "--out", str(report))
        assert code == 0 and "bound=246" in out
        code, out = run(capsys, "report", str(report))
        assert code == 0 and "valid" in out

    def test_marginal_chain(self, capsys, tmp_path):
        tup = tmp_path / "t3.txt"
        tup.write_text("0\n2\n6\n")
        code, out = run(capsys, "chain", "hm", "--dhl-rule", "marginal", "--k", "3",
                        "--m", "1", "--tuple", str(tup))
        assert code == 0 and "bound=6" in out

    def test_cert_file_chain(self, capsys, tmp_path):
        cert = tmp_path / "c.txt"
        run(capsys, "mk", "krylov", "--k", "5", "--n", "10", "--out", str(cert))
        tup = tmp_path / "t5.txt"
        tup.write_text("0\n4\n6\n10\n12\n")
        code, out = run(capsys, "chain", "hm", "--dhl-rule", "mk", "--k", "5", "--m", "1",
                        "--cert", str(cert), "--tuple", str(tup))
        assert code == 0 and "bound=12" in out

    def test_trunc_chain(self, capsys, tmp_path):
        # gate: 600/200 + 180/100 = 4.8 < 7; threshold 1/(1/4 + 1/200) < 4
        tup = tmp_path / "t10.txt"
        code, _ = run(capsys, "tuple", "find", "--k", "10", "--method", "eratosthenes",
                      "--out", str(tup))
        assert code == 0
        code, out = run(capsys, "chain", "hm", "--dhl-rule", "trunc", "--k", "10",
                        "--m", "1", "--varpi", "1/200", "--delta", "1/100",
                        "--cert-value", "4", "--cert-source", "synthetic",
                        "--tuple", str(tup))
        assert code == 0 and "rule=trunc" in out

    def test_report_flags_tampering(self, capsys, tmp_path):
        report = tmp_path / "r.txt"
        run(capsys, "chain", "hm", "--dhl-rule", "eps", "--k", "50", "--m", "1",
            "--eps", "1/25", "--hyp", "BV", "--cert-value", "4.0043",
            "--tuple", data_path("tuple_50_246.txt"), "--out", str(report))
        text = report.read_text().replace("margin=43/10000", "margin=1/2")
        report.write_text(text)
        code, out = run(capsys, "report", str(report))
        assert code == 1 and "INVALID" in out
