"""Smoke test for the Python bindings: `python python/smoke_test.py`."""

import afdm_jsg_py as aj


def main():
    a = aj.daft_matrix(16)
    err = max(
        abs(sum(a[r][k] * a[c][k].conjugate() for k in range(16)) - (1.0 if r == c else 0.0))
        for r in range(16)
        for c in range(16)
    )
    assert err < 1e-10, err

    cfg = aj.SimConfig("seed = 5\n[sweep]\nebn0_db = [4.0]\n[frames]\nmax_frames = 8\nbatch = 8\n")
    cfg.validate()
    assert cfg.seed == 5
    d = cfg.to_dict()
    d["receivers"] = [r for r in d["receivers"] if r["kind"] in ("MMSE_LDPC", "E_JSG")]
    cfg = aj.SimConfig.from_dict(d)
    rows = aj.run_ber(cfg, workers=1)
    assert {r["receiver"] for r in rows} == {"MMSE_LDPC", "E_JSG"}
    assert all(0.0 <= r["ber"] <= 1.0 and r["frames"] == 8 for r in rows)

    assert set(aj.receiver_kinds()) >= {"MMSE_LDPC", "EP_JSG", "E_JSG"}
    ops = aj.count_ops("E_JSG", {"n_v": 512, "n_f": 512, "d_f": [], "d_f_ave": 5.0, "d_v_ave": 5.0, "m": 4, "n": 512})
    assert ops["mul"] == 12288, ops
    t = aj.latency("E_JSG", {k: 1.0 for k in ("t_vi_vn", "t_vi_fn", "t_ldpc_vn", "t_ldpc_cn", "t_res_mmse", "t_res_idd", "t_res_jsg", "t_mmse")})
    assert t == 24.0, t
    ext = aj.cn_update([1.0, -2.0, 3.0])
    assert len(ext) == 3 and ext[0] < 0
    assert aj.fmt_float(0.1234567891) == "0.123456789"
    print("python smoke test ok:", [(r["receiver"], r["ber"]) for r in rows])


if __name__ == "__main__":
    main()
