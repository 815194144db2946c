#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
文件系统工具

输出文件的写入都经过这里：先建目录，再整体写入，避免留下半截文件。
"""

import csv
import io
import json
import os
import tempfile
from pathlib import Path


class FileSystemUtils:
    """文件系统工具类"""

    @staticmethod
    def ensure_dir(dir_path):
        """确保目录存在

        Args:
            dir_path: 目录路径
        """
        Path(dir_path).mkdir(parents=True, exist_ok=True)

    @staticmethod
    def atomic_write_text(file_path, text):
        """原子写入文本文件

        先写同目录下的临时文件，再替换目标文件。

        Args:
            file_path: 目标路径
            text: 文本内容

        Returns:
            Path: 写入的文件路径
        """
        path = Path(file_path)
        FileSystemUtils.ensure_dir(path.parent if str(path.parent) else ".")

        fd, tmp_name = tempfile.mkstemp(
            prefix=f".{path.name}.", suffix=".tmp", dir=str(path.parent or ".")
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp_name, path)
        except Exception:
            FileSystemUtils.safe_remove(tmp_name)
            raise
        return path

    @staticmethod
    def write_json(file_path, data):
        """写入 JSON 文件（键顺序固定，便于逐字节比较）

        Args:
            file_path: 目标路径
            data: 可序列化对象

        Returns:
            Path: 写入的文件路径
        """
        text = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
        return FileSystemUtils.atomic_write_text(file_path, text)

    @staticmethod
    def write_csv(file_path, header, rows):
        """写入 CSV 文件

        Args:
            file_path: 目标路径
            header: 列名列表
            rows: 行的可迭代对象

        Returns:
            Path: 写入的文件路径
        """
        return FileSystemUtils.atomic_write_text(file_path, FileSystemUtils.csv_text(header, rows))

    @staticmethod
    def csv_text(header, rows):
        """CSV 内容（行尾统一为 \\n）"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
        return buffer.getvalue()

    @staticmethod
    def read_csv(file_path):
        """读取 CSV 文件

        Args:
            file_path: 文件路径

        Returns:
            tuple: (列名列表, 行列表)
        """
        with open(file_path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            rows = list(reader)
        if not rows:
            return [], []
        return rows[0], rows[1:]

    @staticmethod
    def safe_remove(file_path):
        """安全删除文件

        Args:
            file_path: 文件路径

        Returns:
            bool: 是否删除成功
        """
        try:
            if os.path.exists(file_path):
                os.remove(file_path)
                return True
            return False
        except OSError:
            return False
