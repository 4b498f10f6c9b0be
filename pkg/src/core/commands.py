"""
Command Dispatch
Subcommands of the CLI (comp, verify, rates, ...) registered with one manager
"""

import argparse
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

from src.core.errors import PreconditionFailed

logger = logging.getLogger(__name__)


class CommandType(Enum):
    """Enumeration of all CLI subcommands"""
    COMP = "comp"
    VERIFY = "verify"
    RATES = "rates"
    SELECT = "select"
    EQUALIZER = "equalizer"


@dataclass
class CommandOutcome:
    """
    What a command hands back to main

    document is written as JSON, rows as CSV; passed is False when a
    requested check or experiment failed.
    """
    document: Any
    rows: List[Dict[str, Any]] = field(default_factory=list)
    passed: bool = True


class Command(ABC):
    """
    Abstract base class for all subcommands
    Each command must implement configure and run
    """

    command_type: CommandType = None
    help: str = ""

    @abstractmethod
    def configure(self, parser: argparse.ArgumentParser):
        """
        Add this command's options
        Args:
            parser: The subparser created for this command
        """

    @abstractmethod
    def run(self, args: argparse.Namespace, context) -> CommandOutcome:
        """
        Execute the command
        Args:
            args: Parsed arguments, global options included
            context: Run-wide settings (problem loader, MC config, cap)
        Returns:
            The outcome to report
        """


class CommandManager:
    """
    Manages subcommands and builds the argument parser from them
    """

    def __init__(self, prog: str = None, description: str = "",
                 configure_globals: Optional[Callable[[argparse.ArgumentParser], None]] = None):
        self.prog = prog
        self.description = description
        self.configure_globals = configure_globals
        self.commands: Dict[CommandType, Command] = {}

    def register_command(self, command: Command):
        """Register a new command"""
        if command.command_type is None:
            raise PreconditionFailed(f"{type(command).__name__} has no command type")
        self.commands[command.command_type] = command

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=self.prog, description=self.description)
        if self.configure_globals:
            self.configure_globals(parser)
        subparsers = parser.add_subparsers(dest='command', metavar='command')
        subparsers.required = True
        for command_type, command in self.commands.items():
            command.configure(subparsers.add_parser(command_type.value, help=command.help))
        return parser

    def get_command(self, name: str) -> Command:
        try:
            return self.commands[CommandType(name)]
        except (KeyError, ValueError):
            raise PreconditionFailed(f"command '{name}' is not registered") from None

    def dispatch(self, args: argparse.Namespace, context) -> CommandOutcome:
        """Run the command named by args.command"""
        command = self.get_command(args.command)
        logger.debug("dispatching %s", args.command)
        return command.run(args, context)
