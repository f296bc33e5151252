#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Giao diện dòng lệnh cho các bộ ước lượng Kaczmarz.

    python main.py simulate --config run.json [--with-theta]
    python main.py verify [--seed N] [--sizes 2,3,4]
    python main.py compare --config run.json --change-step K --tol X [--with-theta]

Mã thoát: 0 thành công, 1 lỗi I/O, 2 cấu hình không hợp lệ, 3 tính chất kiểm tra thất bại.
stdout chỉ chứa kết quả (bảng, dòng PASS/FAIL); log ghi ra stderr.
"""

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from tabulate import tabulate

from config import parse_sizes, settings
from harness import LabelSummary, MetricsRecord, compare_summary, records_to_frame, run_scenario
from models import ConfigValidationError, load_run_config
from verification import run_property_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_PROPERTY = 3


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """
    Cấu hình logging: luôn ghi ra stderr, thêm file nếu LOG_FILE được đặt.
    """
    level = (level or settings.LOG_LEVEL).upper()
    log_file = settings.LOG_FILE if log_file is None else log_file
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def write_records_csv(records: Sequence[MetricsRecord], output: str, with_theta: bool = False) -> Path:
    """
    Ghi bản ghi ra CSV. Thư mục đích phải tồn tại sẵn.

    Raises:
        OSError: Không ghi được file
    """
    path = Path(output)
    if not path.parent.is_dir():
        raise FileNotFoundError(f"Thư mục đầu ra không tồn tại: {path.parent}")
    frame = records_to_frame(records, with_theta=with_theta)
    frame.to_csv(path, index=False, lineterminator="\n", na_rep="")
    logger.info(f"Đã ghi {len(frame)} dòng vào {path}")
    return path


def _report_config_error(error: Exception) -> None:
    messages = error.errors if isinstance(error, ConfigValidationError) else [str(error)]
    for message in messages:
        print(f"Lỗi cấu hình: {message}", file=sys.stderr)
    logger.warning(f"Cấu hình bị từ chối: {len(messages)} lỗi")


def cmd_simulate(config_path: str, with_theta: bool = False) -> int:
    """
    Chạy kịch bản trong file cấu hình và ghi CSV chỉ số theo từng bước.
    """
    try:
        run_config = load_run_config(config_path)
        scenario = run_config.to_scenario()
    except ValueError as e:
        _report_config_error(e)
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Lỗi I/O: {e}")
        return EXIT_IO

    records = run_scenario(scenario)
    try:
        write_records_csv(records, run_config.output, with_theta=with_theta)
    except OSError as e:
        logger.error(f"Lỗi I/O: {e}")
        return EXIT_IO
    return EXIT_OK


def cmd_verify(seed: Optional[int] = None, sizes: Optional[Sequence[int]] = None,
               tolerance_scale: float = 1.0) -> int:
    """
    Chạy bộ kiểm tra tính chất và in một dòng PASS/FAIL cho mỗi tính chất.
    """
    seed = settings.VERIFY_SEED if seed is None else seed
    sizes = settings.verify_sizes() if sizes is None else list(sizes)
    logger.info(f"verify: seed={seed}, sizes={sizes}")
    results = run_property_suite(seed, sizes, tolerance_scale=tolerance_scale)
    for result in results:
        print(result.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error(f"Tính chất thất bại: {', '.join(failed)}")
        return EXIT_PROPERTY
    return EXIT_OK


def format_summary_table(summaries: Sequence[LabelSummary]) -> str:
    """Bảng căn cột cho lệnh compare."""
    rows = []
    for s in summaries:
        rows.append([
            s.label,
            s.reconvergence_time if s.reconvergence_time is not None else "never",
            f"{s.final_error:.3e}",
            f"{s.mean_extended_residual:.3e}" if not math.isnan(s.mean_extended_residual) else "-",
            s.skip_count,
            f"{s.memory:.1f}" if s.memory is not None else "-",
        ])
    headers = ["label", "reconvergence", "final_error", "mean_ext_residual", "skipped", "memory"]
    return tabulate(rows, headers=headers, tablefmt="simple")


def cmd_compare(config_path: str, change_step: int, tol: float, with_theta: bool = False) -> int:
    """
    Chạy kịch bản, in bảng tóm tắt khả năng bám theo quanh change_step và ghi CSV.
    """
    if not (tol > 0 and math.isfinite(tol)):
        print(f"Lỗi cấu hình: tol phải > 0, nhận được {tol}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        run_config = load_run_config(config_path)
        scenario = run_config.to_scenario()
    except ValueError as e:
        _report_config_error(e)
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Lỗi I/O: {e}")
        return EXIT_IO
    if not 1 <= change_step <= scenario.steps:
        print(f"Lỗi cấu hình: change-step phải nằm trong [1, {scenario.steps}], nhận được {change_step}",
              file=sys.stderr)
        return EXIT_CONFIG

    records = run_scenario(scenario)
    summaries = compare_summary(records, change_step, tol, configs=run_config.estimator_configs())
    print(format_summary_table(summaries))
    try:
        write_records_csv(records, run_config.output, with_theta=with_theta)
    except OSError as e:
        logger.error(f"Lỗi I/O: {e}")
        return EXIT_IO
    return EXIT_OK


def _sizes_arg(text: str) -> List[int]:
    try:
        return parse_sizes(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Ước lượng tham số tín hiệu điều hòa bằng các biến thể Kaczmarz.')
    parser.add_argument('--log-level', type=str, default=None, help='Mức log (mặc định KACZMARZ_LOG_LEVEL)')
    sub = parser.add_subparsers(dest='command', required=True)

    p_sim = sub.add_parser('simulate', help='Chạy kịch bản và ghi CSV chỉ số')
    p_sim.add_argument('--config', required=True, help='Đường dẫn file cấu hình JSON')
    p_sim.add_argument('--with-theta', action='store_true', help='Thêm cột theta_i vào CSV')

    p_ver = sub.add_parser('verify', help='Chạy bộ kiểm tra tính chất')
    p_ver.add_argument('--seed', type=int, default=None, help='Hạt giống (mặc định KACZMARZ_VERIFY_SEED)')
    p_ver.add_argument('--sizes', type=_sizes_arg, default=None,
                       help='Danh sách số tần số, ví dụ 2,3,4 (mặc định KACZMARZ_VERIFY_SIZES)')
    p_ver.add_argument('--tolerance-scale', type=float, default=1.0, help=argparse.SUPPRESS)

    p_cmp = sub.add_parser('compare', help='So sánh khả năng bám theo của các bộ ước lượng')
    p_cmp.add_argument('--config', required=True, help='Đường dẫn file cấu hình JSON')
    p_cmp.add_argument('--change-step', type=int, required=True, help='Bước thay đổi tham số')
    p_cmp.add_argument('--tol', type=float, required=True, help='Ngưỡng sai số tham số')
    p_cmp.add_argument('--with-theta', action='store_true', help='Thêm cột theta_i vào CSV')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse dùng mã 2 cho tham số sai, trùng với lỗi cấu hình
        return int(e.code) if isinstance(e.code, int) else EXIT_CONFIG

    try:
        setup_logging(level=args.log_level)
    except OSError as e:
        print(f"Lỗi I/O: không mở được file log: {e}", file=sys.stderr)
        return EXIT_IO

    if args.command == 'simulate':
        return cmd_simulate(args.config, with_theta=args.with_theta)
    if args.command == 'verify':
        return cmd_verify(args.seed, args.sizes, tolerance_scale=args.tolerance_scale)
    if args.command == 'compare':
        return cmd_compare(args.config, args.change_step, args.tol, with_theta=args.with_theta)
    parser.print_help()
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
