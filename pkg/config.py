#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Cấu hình chung cho bộ ước lượng Kaczmarz.
Các giá trị mặc định có thể ghi đè bằng biến môi trường tiền tố KACZMARZ_ hoặc file .env.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv
from pathlib import Path
from typing import List
import logging

logger = logging.getLogger(__name__)

# Lấy đường dẫn tuyệt đối đến file .env
env_path = Path(__file__).parent / '.env'

# Load .env file (không bắt buộc phải tồn tại)
load_dotenv(dotenv_path=env_path, override=False)


class Settings(BaseSettings):
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = ""  # Rỗng = không ghi log ra file

    # Giá trị mặc định cho EstimatorConfig
    DEFAULT_GAMMA0: float = 100.0
    DEFAULT_SING_REL_TOL: float = 1e-12

    # Lệnh verify
    VERIFY_SEED: int = 2024
    VERIFY_SIZES: str = "2,3,4"  # Số tần số của từng lưới kiểm tra

    model_config = SettingsConfigDict(
        env_prefix="KACZMARZ_",
        env_file=str(env_path),
        env_file_encoding='utf-8',
        case_sensitive=True,
        extra="ignore",
    )

    def verify_sizes(self) -> List[int]:
        """
        Tách chuỗi VERIFY_SIZES thành danh sách số tần số.

        Returns:
            List[int]: Ví dụ "2,3,4" -> [2, 3, 4]
        """
        return parse_sizes(self.VERIFY_SIZES)


def parse_sizes(text: str) -> List[int]:
    """
    Đọc danh sách số nguyên dương ngăn cách bởi dấu phẩy.

    Raises:
        ValueError: Nếu có phần tử không phải số nguyên dương
    """
    sizes = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        value = int(part)
        if value < 1:
            raise ValueError(f"sizes: số tần số phải >= 1, nhận được {value}")
        sizes.append(value)
    if not sizes:
        raise ValueError("sizes: danh sách rỗng")
    return sizes


try:
    settings = Settings()
    logger.debug(f"Settings loaded: {settings.model_dump()}")
except Exception as e:
    logger.error(f"Error loading settings: {str(e)}")
    raise
